"""Analytic models of ring resonators and directional couplers.

Units: wavelengths and linewidths in nm, device lengths in um, derivatives of
lengths with respect to wavelength in um/nm. See :mod:`loqckit.units`.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

import numpy as np

from loqckit import units
from loqckit.errors import DomainError

# Mode-solver outputs for the nominal rib geometry. Documentation only.
ISOLATED_WAVEGUIDE_NEFF = 1.548
DELTA_N_NOMINAL = 0.02069
DELTA_N_NARROW_WAVEGUIDE = 0.02135
NOMINAL_COUPLING_LENGTH_UM = 37.47


# ----------------------------------------------------------------------------
# Ring resonators

@dataclass(frozen=True)
class RingParams:
    """Parameters of the ring transmission model.

    The resonance is a Lorentzian dip with internal linewidth ``w_int`` and
    coupling linewidth ``w_c`` (both full widths, nm); the background carries
    Fabry-Perot fringes from the grating couplers with contrast ``F_c``,
    reference wavelength ``lambda_fp`` and period ``FSR_fp``.
    """

    lambda0: float
    w_int: float
    w_c: float
    T0: float = 1.0
    F_c: float = 0.0
    lambda_fp: float = 0.0
    FSR_fp: float = 1.0

    def __post_init__(self):
        if not self.w_int > 0:
            raise DomainError("w_int must be positive")
        if not self.w_c >= 0:
            raise DomainError("w_c must be non-negative")
        if not self.T0 > 0:
            raise DomainError("T0 must be positive")
        if not self.F_c >= 0:
            raise DomainError("F_c must be non-negative")
        if not self.FSR_fp > 0:
            raise DomainError("FSR_fp must be positive")

    @property
    def total_linewidth(self) -> float:
        return self.w_int + self.w_c

    @property
    def q_int(self) -> float:
        return intrinsic_q(self.lambda0, self.w_int)


def fringe_envelope(lam, T0, F_c, lambda_fp, FSR_fp):
    return T0 / (1.0 + F_c * np.sin(np.pi * (lam - lambda_fp) / FSR_fp) ** 2)


def lorentz_dip(lam, lambda0, w_int, w_c):
    s = w_c + w_int
    return 1.0 - w_c * w_int / (s * s / 4.0 + (lam - lambda0) ** 2)


def ring_transmission(lam, p: RingParams):
    """Transmission past a ring: fringe envelope times the resonance dip.

    ``lam`` may be a scalar or an array (nm).
    """
    lam = np.asarray(lam, dtype=float)
    out = fringe_envelope(lam, p.T0, p.F_c, p.lambda_fp, p.FSR_fp) * lorentz_dip(
        lam, p.lambda0, p.w_int, p.w_c)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RingGeometry:
    radius_um: float
    fsr_nm: float

    def __post_init__(self):
        if not (self.radius_um > 0 and self.fsr_nm > 0):
            raise DomainError("ring radius and FSR must be positive")


def group_index(geometry: RingGeometry, lam_nm: float) -> float:
    """``n_g = lambda^2 / (2 pi R FSR)``."""
    circumference_nm = 2.0 * math.pi * units.um_to_nm(geometry.radius_um)
    return lam_nm**2 / (circumference_nm * geometry.fsr_nm)


def intrinsic_q(lambda0_nm: float, w_int_nm: float) -> float:
    if not (lambda0_nm > 0 and w_int_nm > 0):
        raise DomainError("wavelength and linewidth must be positive")
    return lambda0_nm / w_int_nm


def propagation_loss(n_g: float, q_int: float, lam_nm: float) -> tuple[float, float]:
    """Propagation loss from the intrinsic quality factor.

    Returns ``(alpha, alpha_dB)`` in 1/cm and dB/cm, from
    ``alpha = 2 pi n_g / (Q_int lambda)``.
    """
    if not (n_g > 0 and q_int > 0 and lam_nm > 0):
        raise DomainError("n_g, Q_int and wavelength must be positive")
    alpha_per_nm = 2.0 * math.pi * n_g / (q_int * lam_nm)
    alpha = units.per_nm_to_per_cm(alpha_per_nm)
    return alpha, units.alpha_to_db(alpha)


# ----------------------------------------------------------------------------
# Directional couplers

@dataclass(frozen=True)
class CouplerModel:
    """Coupling length and offset length of a coupler design at one wavelength.

    ``d_ell_c_d_lambda`` and ``d_ell_0_d_lambda`` linearize both lengths
    around ``lambda_nm``.
    """

    ell_c: float
    ell_0: float
    d_ell_c_d_lambda: float = 0.0
    d_ell_0_d_lambda: float = 0.0
    lambda_nm: float = 1554.0
    note: str = ""

    def __post_init__(self):
        if not self.ell_c > 0:
            raise DomainError("coupling length must be positive")
        if not (math.isfinite(self.d_ell_c_d_lambda) and math.isfinite(self.d_ell_0_d_lambda)):
            raise DomainError("length derivatives must be finite")
        if self.d_ell_c_d_lambda > 0 or self.d_ell_0_d_lambda < 0:
            warnings.warn(
                "unusual dispersion signs: expected d(ell_c)/d(lambda) <= 0 and "
                "d(ell_0)/d(lambda) >= 0",
                stacklevel=2,
            )

    def at(self, lam_nm: float) -> "CouplerModel":
        """Linearized model shifted to another wavelength."""
        d = lam_nm - self.lambda_nm
        return CouplerModel(
            self.ell_c + self.d_ell_c_d_lambda * d,
            self.ell_0 + self.d_ell_0_d_lambda * d,
            self.d_ell_c_d_lambda,
            self.d_ell_0_d_lambda,
            lam_nm,
            self.note,
        )


def default_coupler_model() -> CouplerModel:
    """Coupler model for the 1 um / 400 nm rib design near 1554 nm.

    Reconstructed rather than measured: the lengths reproduce the reported
    splitting ratios of the 8.5 um and 12.4 um couplers, the slope of ``ell_c``
    comes from the 5 nm wavelength row of the sensitivity table and the slope
    of ``ell_0`` is set an order of magnitude smaller with opposite sign.
    """
    return CouplerModel(
        ell_c=33.7,
        ell_0=8.2,
        d_ell_c_d_lambda=-0.59 / 5.0,
        d_ell_0_d_lambda=0.012,
        lambda_nm=1554.0,
        note="reconstructed",
    )


def _phase_arg(L_int, m: CouplerModel):
    return 0.5 * np.pi * (np.asarray(L_int, dtype=float) + m.ell_0) / m.ell_c


def cross_power(L_int, m: CouplerModel):
    """Cross-over power fraction ``sin^2(pi/2 (L + ell_0) / ell_c)``."""
    out = np.sin(_phase_arg(L_int, m)) ** 2
    return float(out) if np.ndim(out) == 0 else out


def cross_power_vs_ell_c(L_int, m: CouplerModel):
    """Derivative of the cross power with respect to ``ell_c`` (1/um)."""
    theta = _phase_arg(L_int, m)
    out = -np.sin(2.0 * theta) * theta / m.ell_c
    return float(out) if np.ndim(out) == 0 else out


def _check_branch(branch: str) -> float:
    if branch not in ("+", "-"):
        raise DomainError(f"branch must be '+' or '-', got {branch!r}")
    return 1.0 if branch == "+" else -1.0


@dataclass(frozen=True)
class CouplerDesign:
    L_int: float
    C: float
    k: int
    branch: str
    valid: bool
    dispersion: float = float("nan")


def design_length(C_target: float, k: int, branch: str, m: CouplerModel) -> CouplerDesign:
    """Interaction length giving ``C_target`` on solution ``(k, branch)``.

    ``L = ell_c [2k +/- arccos(1 - 2C)/pi] - ell_0``. A negative length is
    returned with ``valid=False``; the caller should try a larger ``k``.
    """
    if not (0.0 < C_target < 1.0):
        raise DomainError(f"target ratio must lie in (0, 1), got {C_target}")
    if k < 0:
        raise DomainError("k must be non-negative")
    sign = _check_branch(branch)
    L = m.ell_c * (2 * k + sign * math.acos(1.0 - 2.0 * C_target) / math.pi) - m.ell_0
    return CouplerDesign(L, C_target, k, branch, L >= 0.0,
                         splitting_dispersion(C_target, k, branch, m))


def design_solutions(C_target: float, m: CouplerModel, k_max: int = 3) -> list[CouplerDesign]:
    """All ``(k, branch)`` solutions for ``k <= k_max``, shortest first."""
    sols = [design_length(C_target, k, b, m) for k in range(k_max + 1) for b in ("-", "+")]
    return sorted(sols, key=lambda s: s.L_int)


def best_design(C_target: float, m: CouplerModel, k_max: int = 3) -> CouplerDesign:
    """The valid solution with the weakest wavelength dependence."""
    valid = [s for s in design_solutions(C_target, m, k_max) if s.valid]
    if not valid:
        raise DomainError(f"no positive interaction length up to k={k_max}")
    return min(valid, key=lambda s: (s.dispersion, s.L_int))


def splitting_dispersion(C: float, k: int, branch: str, m: CouplerModel) -> float:
    """``|dC/dlambda|`` (1/nm) at the design point ``(C, k, branch)``."""
    if not (0.0 < C < 1.0):
        raise DomainError(f"C must lie in (0, 1), got {C}")
    sign = _check_branch(branch)
    a = math.acos(1.0 - 2.0 * C)
    bracket = math.pi * m.d_ell_0_d_lambda - (2.0 * math.pi * k + sign * a) * m.d_ell_c_d_lambda
    return abs(math.sqrt(C * (1.0 - C)) * bracket / m.ell_c)


# ----------------------------------------------------------------------------
# Wavelength-sampled coupler models

@dataclass(frozen=True)
class CouplerCurve:
    """``ell_c`` and ``ell_0`` sampled on a wavelength grid."""

    wavelengths: tuple[float, ...]
    ell_c: tuple[float, ...]
    ell_0: tuple[float, ...]

    def __post_init__(self):
        lam = np.asarray(self.wavelengths, dtype=float)
        if len(lam) == 0 or len(lam) != len(self.ell_c) or len(lam) != len(self.ell_0):
            raise DomainError("wavelength, ell_c and ell_0 samples must have equal non-zero length")
        if np.any(np.diff(lam) <= 0):
            raise DomainError("wavelengths must be strictly increasing")

    def model_at(self, lam_nm: float) -> CouplerModel:
        """Linear interpolation, with slopes from the bracketing samples."""
        lam = np.asarray(self.wavelengths)
        lc = np.asarray(self.ell_c)
        l0 = np.asarray(self.ell_0)
        if len(lam) == 1:
            return CouplerModel(float(lc[0]), float(l0[0]), lambda_nm=float(lam[0]))
        i = int(np.clip(np.searchsorted(lam, lam_nm) - 1, 0, len(lam) - 2))
        h = lam[i + 1] - lam[i]
        dlc = (lc[i + 1] - lc[i]) / h
        dl0 = (l0[i + 1] - l0[i]) / h
        d = lam_nm - lam[i]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return CouplerModel(float(lc[i] + dlc * d), float(l0[i] + dl0 * d),
                                float(dlc), float(dl0), float(lam_nm))


# ----------------------------------------------------------------------------
# Fabrication sensitivity

@dataclass(frozen=True)
class SensitivityEntry:
    parameter: str
    nominal: str
    unit: str
    variation: float
    delta_ell_c_um: float


@dataclass(frozen=True)
class SensitivityLedger:
    """Changes of the coupling length for listed fabrication variations."""

    entries: tuple[SensitivityEntry, ...]
    nominal_ell_c_um: float = NOMINAL_COUPLING_LENGTH_UM

    def __post_init__(self):
        for e in self.entries:
            if e.variation == 0:
                raise DomainError(f"zero variation for {e.parameter!r}")

    def __getitem__(self, name: str) -> SensitivityEntry:
        for e in self.entries:
            if e.parameter == name:
                return e
        raise KeyError(f"unknown sensitivity parameter {name!r}")

    def __len__(self):
        return len(self.entries)

    @property
    def names(self) -> list[str]:
        return [e.parameter for e in self.entries]

    @classmethod
    def from_csv(cls, path_or_lines, nominal_ell_c_um: float = NOMINAL_COUPLING_LENGTH_UM):
        if isinstance(path_or_lines, (str, bytes)) or hasattr(path_or_lines, "__fspath__"):
            with open(path_or_lines, newline="") as fh:
                rows = list(csv.DictReader(fh))
        else:
            rows = list(csv.DictReader(path_or_lines))
        entries = tuple(
            SensitivityEntry(
                r["parameter"], r["nominal"], r["unit"],
                float(r["variation"]), float(r["delta_ellc_um"]),
            )
            for r in rows
        )
        return cls(entries, nominal_ell_c_um)


def load_sensitivity_ledger() -> SensitivityLedger:
    """The bundled mode-solver sensitivity table (11 rows)."""
    text = resources.files("loqckit").joinpath("data/sensitivity.csv").read_text()
    return SensitivityLedger.from_csv(text.splitlines())


@dataclass(frozen=True)
class SensitivityResult:
    delta_ell_c: float
    delta_C: float | None = None


def sensitivity_combination(
    perturbations: Iterable[tuple[str, float]],
    ledger: SensitivityLedger,
    L_int: float | None = None,
    model: CouplerModel | None = None,
) -> SensitivityResult:
    """Linear combination of tabulated coupling-length changes.

    Each perturbation is ``(parameter, multiplier)``: the multiplier counts
    how many of the tabulated variations are applied. If a coupler
    ``(L_int, model)`` is given, the first-order change of its cross power is
    also returned.
    """
    d_ell = math.fsum(mult * ledger[name].delta_ell_c_um for name, mult in perturbations)
    dC = None
    if L_int is not None and model is not None:
        dC = cross_power_vs_ell_c(L_int, model) * d_ell
    return SensitivityResult(d_ell, dC)
