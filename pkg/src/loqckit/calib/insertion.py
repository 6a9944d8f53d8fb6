"""Grating-coupler/detector calibration and directional-coupler insertion loss.

Light enters port 2 of every device and leaves through port 1 (reference),
3 (through) or 4 (cross). Three calibration device types pin down the
port transmissions ``T_1<-2``, ``T_3<-2``, ``T_4<-2`` and the Y-splitter
transmission ``Y``:

====  ===========  =====================
type  output role  measured transmission
====  ===========  =====================
1     reference    T1
2     reference    Y * T1
2     through      Y * T3
3     reference    Y * T1
3     cross        Y * T4
====  ===========  =====================

All records are fitted at once in the log domain, each unknown being a
Chebyshev series on the calibrated wavelength interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev

from loqckit import units
from loqckit.calib.sweep import SweepDataset
from loqckit.errors import DomainError, IdentifiabilityError

FUNCTIONS = ("T_1<-2", "T_3<-2", "T_4<-2", "Y")
DEFAULT_ORDER = 15

# (device type, role) -> functions whose logs add up to the measured log-transmission
_TERMS = {
    (1, "reference"): ("T_1<-2",),
    (2, "reference"): ("Y", "T_1<-2"),
    (2, "through"): ("Y", "T_3<-2"),
    (3, "reference"): ("Y", "T_1<-2"),
    (3, "cross"): ("Y", "T_4<-2"),
}


@dataclass(frozen=True)
class CalibrationRun:
    device_type: int
    role: str
    data: SweepDataset


@dataclass(frozen=True)
class DutRun:
    """Reference, through and cross sweeps of one directional-coupler device."""

    device: str
    reference: SweepDataset
    through: SweepDataset
    cross: SweepDataset


@dataclass(frozen=True, eq=False)
class CalibrationSolution:
    """Chebyshev coefficients of the natural-log transmissions."""

    coefficients: dict[str, np.ndarray]
    lambda_min: float
    lambda_max: float
    order: int
    residual_rms: float

    def _x(self, lam):
        lam = np.asarray(lam, dtype=float)
        return (2.0 * lam - (self.lambda_max + self.lambda_min)) / (self.lambda_max - self.lambda_min)

    def log_transmission(self, name: str, lam):
        return chebyshev.chebval(self._x(lam), self.coefficients[name])

    def transmission(self, name: str, lam):
        return np.exp(self.log_transmission(name, lam))

    def transmission_db(self, name: str, lam):
        return units.to_db(self.transmission(name, lam))

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "basis": "chebyshev, natural log of linear transmission",
            "residual_rms": self.residual_rms,
            "coefficients": {k: v.tolist() for k, v in self.coefficients.items()},
        }


@dataclass(frozen=True)
class InsertionLossReport:
    devices: tuple[str, ...]
    loss_db: tuple[float, ...]
    corrected: bool
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "corrected": self.corrected,
            "devices": [{"device": d, "insertion_loss_db": v}
                        for d, v in zip(self.devices, self.loss_db)],
            "summary": self.stats,
        }


def summarize(values: Sequence[float]) -> dict:
    v = np.asarray(values, dtype=float)
    q25, q50, q75 = np.percentile(v, [25, 50, 75])
    return {
        "n": int(v.size),
        "mean": float(v.mean()),
        "std": float(v.std(ddof=1)) if v.size > 1 else 0.0,
        "median": float(q50),
        "q25": float(q25),
        "q75": float(q75),
        "min": float(v.min()),
        "max": float(v.max()),
    }


def _unresolved(A, tol):
    """Names of functions touched by the null space of the design matrix."""
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > tol * s[0])) if s.size else 0
    null = vt[rank:]
    k = A.shape[1] // len(FUNCTIONS)
    names = []
    for i, name in enumerate(FUNCTIONS):
        if null.size and np.linalg.norm(null[:, i * k:(i + 1) * k]) > 1e-8:
            names.append(name)
    return rank, names


def fit_calibration(runs: Sequence[CalibrationRun], order: int = DEFAULT_ORDER,
                    wavelength_range: tuple[float, float] | None = None) -> CalibrationSolution:
    """Simultaneous linear least-squares solve for the four log-transmissions."""
    if order < 0:
        raise DomainError("polynomial order must be non-negative")
    if not runs:
        raise IdentifiabilityError("no calibration data: T_1<-2, T_3<-2, T_4<-2, Y unresolved")
    for r in runs:
        if (r.device_type, r.role) not in _TERMS:
            raise DomainError(f"unknown calibration record (type {r.device_type}, role {r.role!r})")
    if wavelength_range is None:
        lo = min(r.data.wavelength[0] for r in runs)
        hi = max(r.data.wavelength[-1] for r in runs)
    else:
        lo, hi = wavelength_range
    if not hi > lo:
        raise DomainError("empty calibration wavelength range")

    k = order + 1
    blocks, rhs = [], []
    for r in runs:
        lam = r.data.wavelength
        keep = (lam >= lo) & (lam <= hi)
        lam = lam[keep]
        y = r.data.linear()[keep]
        if np.any(y <= 0):
            raise DomainError(f"non-positive transmission in calibration record (type {r.device_type}, {r.role})")
        V = chebyshev.chebvander((2.0 * lam - (hi + lo)) / (hi - lo), order)
        row = np.zeros((lam.size, k * len(FUNCTIONS)))
        for name in _TERMS[(r.device_type, r.role)]:
            i = FUNCTIONS.index(name)
            row[:, i * k:(i + 1) * k] = V
        blocks.append(row)
        rhs.append(np.log(y))
    A = np.vstack(blocks)
    b = np.concatenate(rhs)

    # column equilibration keeps the rank test meaningful
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    As = A / norms
    rank, unresolved = _unresolved(As, 1e-10)
    if rank < A.shape[1]:
        raise IdentifiabilityError(
            "calibration data does not determine: " + ", ".join(unresolved))
    coef, *_ = np.linalg.lstsq(As, b, rcond=None)
    coef = coef / norms
    resid = A @ coef - b
    return CalibrationSolution(
        {name: coef[i * k:(i + 1) * k] for i, name in enumerate(FUNCTIONS)},
        float(lo), float(hi), order, float(np.sqrt(np.mean(resid**2))),
    )


def device_insertion_loss(sol: CalibrationSolution, dut: DutRun, correct: bool = True) -> float:
    """Wavelength-averaged insertion loss (dB, positive means loss)."""
    lam = dut.reference.wavelength
    keep = (lam >= sol.lambda_min) & (lam <= sol.lambda_max)
    lam = lam[keep]
    if lam.size == 0:
        raise DomainError(f"device {dut.device!r}: no samples inside the calibrated range")
    p_ref = dut.reference.linear()[keep]
    p_t = np.interp(lam, dut.through.wavelength, dut.through.linear())
    p_c = np.interp(lam, dut.cross.wavelength, dut.cross.linear())
    if correct:
        ratio = (p_t / sol.transmission("T_3<-2", lam) + p_c / sol.transmission("T_4<-2", lam)) / (
            p_ref / sol.transmission("T_1<-2", lam))
    else:
        ratio = (p_t + p_c) / p_ref
    return float(np.mean(-units.to_db(ratio)))


def calibrate_insertion(
    calib_runs: Sequence[CalibrationRun],
    dut_runs: Sequence[DutRun],
    order: int = DEFAULT_ORDER,
    correct: bool = True,
    wavelength_range: tuple[float, float] | None = None,
) -> tuple[CalibrationSolution, InsertionLossReport]:
    """Calibrate port transmissions, then the insertion loss of every DUT.

    The loss of a device is ``(P_t/T3 + P_c/T4) / (P_ref/T1)`` in dB, averaged
    over wavelength. With ``correct=False`` the raw ``(P_t + P_c)/P_ref`` is
    used instead, which shows the bias the calibration removes.
    """
    sol = fit_calibration(calib_runs, order, wavelength_range)
    losses = [device_insertion_loss(sol, d, correct) for d in dut_runs]
    report = InsertionLossReport(
        tuple(d.device for d in dut_runs), tuple(losses), correct,
        summarize(losses) if losses else {},
    )
    return sol, report
