"""Multi-photon evolution through linear circuits and CNOT gate figures of merit.

A circuit with scattering matrix ``S`` maps creation operators as
``a_i^dagger -> sum_j S[j, i] a_j^dagger``. The transition amplitude between
Fock states is then a matrix permanent:

    <out| U |in> = per(S[rows, cols]) / sqrt(prod(in!) prod(out!))

where ``cols`` repeats input mode ``j`` ``in[j]`` times and ``rows`` repeats
output mode ``i`` ``out[i]`` times.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from loqckit.errors import DegenerateCircuitError, DomainError
from loqckit.lincircuit import CNOT_MODES, cnot_netlist, compile_netlist, is_unitary

MAX_PHOTONS = 4
MAX_MODES = 12


@dataclass(frozen=True, order=True)
class FockState:
    """Photon occupation numbers, one per mode."""

    occupations: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(k) for k in self.occupations)
        if any(k < 0 for k in occ):
            raise DomainError("occupation numbers must be non-negative")
        object.__setattr__(self, "occupations", occ)

    @classmethod
    def from_modes(cls, n_modes: int, modes: Iterable[int]) -> "FockState":
        """State with one photon per listed mode (repeats allowed)."""
        occ = [0] * n_modes
        for m in modes:
            if not 0 <= m < n_modes:
                raise DomainError(f"mode {m} out of range for {n_modes} modes")
            occ[m] += 1
        return cls(tuple(occ))

    @property
    def n(self) -> int:
        return sum(self.occupations)

    @property
    def n_modes(self) -> int:
        return len(self.occupations)

    def modes(self) -> list[int]:
        """Mode index of every photon, sorted."""
        return [i for i, k in enumerate(self.occupations) for _ in range(k)]

    def __str__(self):
        return "|" + ",".join(map(str, self.occupations)) + ">"


def permanent(m) -> complex:
    """Permanent of a square matrix by Ryser's formula with Gray-code updates."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"permanent needs a square matrix, got shape {a.shape}")
    return _ryser(a.tolist())


def _ryser(rows: list[list[complex]]) -> complex:
    n = len(rows)
    if n == 0:
        return 1.0 + 0j
    cols = [list(c) for c in zip(*rows)]
    row_sums = [0j] * n
    total = 0j
    sign = -1.0
    gray = 0
    for k in range(1, 2**n):
        # flip the column given by the lowest set bit of k
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        col = cols[j]
        if gray >> j & 1:
            row_sums = [r + c for r, c in zip(row_sums, col)]
        else:
            row_sums = [r - c for r, c in zip(row_sums, col)]
        prod = 1.0 + 0j
        for r in row_sums:
            prod *= r
        total += sign * prod
        sign = -sign
    return complex(total if n % 2 == 0 else -total)


def _check_pair(S, inp: FockState, out: FockState):
    if inp.n != out.n:
        raise DomainError(f"photon number mismatch: {inp.n} in, {out.n} out")
    if inp.n > MAX_PHOTONS:
        raise DomainError(f"at most {MAX_PHOTONS} photons supported")
    if S.shape != (out.n_modes, inp.n_modes):
        raise DomainError(f"states do not match a {S.shape} scattering matrix")
    if S.shape[0] > MAX_MODES:
        raise DomainError(f"at most {MAX_MODES} modes supported")


def amplitude(S, inp: FockState, out: FockState) -> complex:
    """Transition amplitude ``<out|U|in>``."""
    S = np.asarray(S, dtype=complex)
    _check_pair(S, inp, out)
    return _amplitude(S.tolist(), inp, out)


def _amplitude(rows: list[list[complex]], inp: FockState, out: FockState) -> complex:
    cols = inp.modes()
    sub = [[rows[i][j] for j in cols] for i in out.modes()]
    norm = math.prod(math.factorial(k) for k in inp.occupations + out.occupations)
    return _ryser(sub) / math.sqrt(norm)


def fock_states(n_modes: int, n: int) -> list[FockState]:
    """All states of ``n`` photons in ``n_modes`` modes."""
    return [FockState.from_modes(n_modes, c)
            for c in combinations_with_replacement(range(n_modes), n)]


def evolve_distribution(S, inp: FockState) -> dict[FockState, float]:
    """Output probabilities over every Fock state with the input's photon number."""
    S = np.asarray(S, dtype=complex)
    if S.shape[0] != S.shape[1]:
        raise DomainError("scattering matrix must be square")
    if not is_unitary(S, 1e-10):
        raise DomainError("scattering matrix is not unitary")
    return {out: abs(amplitude(S, inp, out)) ** 2 for out in fock_states(S.shape[0], inp.n)}


@dataclass(frozen=True)
class PostSelectionRule:
    """Accept outcomes with exactly one photon per rail pair and none elsewhere."""

    rails: tuple[tuple[int, int], ...]

    def __post_init__(self):
        flat = [m for pair in self.rails for m in pair]
        if len(set(flat)) != len(flat):
            raise DomainError("rail pairs must be disjoint")

    def accepts(self, state: FockState) -> bool:
        occ = state.occupations
        on_rails = set()
        for a, b in self.rails:
            if occ[a] + occ[b] != 1:
                return False
            on_rails.update((a, b))
        return all(k == 0 for i, k in enumerate(occ) if i not in on_rails)

    def accepted_states(self, n_modes: int) -> list[FockState]:
        out = []
        for choice in np.ndindex(*(2,) * len(self.rails)):
            out.append(FockState.from_modes(
                n_modes, [pair[c] for pair, c in zip(self.rails, choice)]))
        return out


# ----------------------------------------------------------------------------
# CNOT

_C = {1: CNOT_MODES.index("c1"), 0: CNOT_MODES.index("c0")}
_T = {1: CNOT_MODES.index("t1"), 0: CNOT_MODES.index("t0")}
CNOT_RULE = PostSelectionRule(((_C[1], _C[0]), (_T[1], _T[0])))
BASIS = ("00", "01", "10", "11")  # control bit first


def _logical_state(bits: str) -> FockState:
    return FockState.from_modes(len(CNOT_MODES), [_C[int(bits[0])], _T[int(bits[1])]])


def _bits_of(state: FockState) -> str:
    occ = state.occupations
    return f"{1 if occ[_C[1]] else 0}{1 if occ[_T[1]] else 0}"


def cnot_truth(bits: str) -> str:
    c, t = int(bits[0]), int(bits[1])
    return f"{c}{t ^ c}"


@dataclass(frozen=True)
class InputOutcome:
    success_probability: float
    correct_probability: float
    conditional: dict[str, float]

    @property
    def fidelity(self) -> float:
        return self.correct_probability / self.success_probability


@dataclass(frozen=True)
class GateReport:
    """Coincidence-basis fidelity and post-selection success probability.

    Both are uniform averages over the four computational basis inputs.
    """

    c_half: float
    c_twothirds: float
    fidelity: float
    success_probability: float
    per_input: dict[str, InputOutcome] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "C_half": self.c_half,
            "C_twothirds": self.c_twothirds,
            "fidelity": self.fidelity,
            "success_probability": self.success_probability,
            "per_input": {
                k: {
                    "success_probability": v.success_probability,
                    "correct_probability": v.correct_probability,
                    "fidelity": v.fidelity,
                    "conditional": v.conditional,
                }
                for k, v in self.per_input.items()
            },
        }


def gate_report(S, c_half: float = float("nan"), c_twothirds: float = float("nan")) -> GateReport:
    """CNOT figures of merit for a 6-mode circuit in the ``cnot_netlist`` mode order."""
    S = np.asarray(S, dtype=complex)
    accepted = CNOT_RULE.accepted_states(S.shape[0])
    for out in accepted[:1]:
        _check_pair(S, _logical_state("00"), out)
    rows = S.tolist()
    per_input = {}
    for bits in BASIS:
        inp = _logical_state(bits)
        probs = {_bits_of(out): abs(_amplitude(rows, inp, out)) ** 2 for out in accepted}
        p_ps = sum(probs.values())
        if p_ps <= 0:
            raise DegenerateCircuitError(f"input |{bits}> never yields a post-selectable outcome")
        per_input[bits] = InputOutcome(
            p_ps, probs[cnot_truth(bits)], {k: v / p_ps for k, v in probs.items()})
    fid = float(np.mean([o.fidelity for o in per_input.values()]))
    p = float(np.mean([o.success_probability for o in per_input.values()]))
    return GateReport(c_half, c_twothirds, fid, p, per_input)


def cnot_report(c_half: float, c_twothirds: float) -> GateReport:
    """Fidelity and success probability of the CNOT built from the given ratios."""
    for name, v in (("C_half", c_half), ("C_twothirds", c_twothirds)):
        if not 0.0 < v < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {v}")
    S = compile_netlist(cnot_netlist(c_half, c_twothirds))
    return gate_report(S, c_half, c_twothirds)


@dataclass(frozen=True, eq=False)
class FidelityMap:
    """Fidelity and success probability on a ``C_half x C_twothirds`` grid.

    Arrays are indexed ``[i_half, i_twothirds]``; failed cells hold NaN.
    """

    c_half: np.ndarray
    c_twothirds: np.ndarray
    fidelity: np.ndarray
    success_probability: np.ndarray
    ideal: tuple[float, float] = (0.5, 2.0 / 3.0)
    fitted: tuple[float, float] | None = None
    errors: dict = field(default_factory=dict)

    def argmax(self) -> tuple[int, int]:
        return tuple(int(i) for i in np.unravel_index(np.nanargmax(self.fidelity), self.fidelity.shape))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["C_half", "C_twothirds", "fidelity", "success_prob"])
        for i, ch in enumerate(self.c_half):
            for j, ct in enumerate(self.c_twothirds):
                w.writerow([repr(float(ch)), repr(float(ct)),
                            repr(float(self.fidelity[i, j])),
                            repr(float(self.success_probability[i, j]))])
            w.writerow([])  # blank line between scans, as gnuplot's pm3d expects
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def gnuplot_script(self, csv_name: str) -> str:
        lines = [
            "set datafile separator ','",
            "set xlabel 'C_{1/2}'",
            "set ylabel 'C_{2/3}'",
            "set view map",
            "set contour base",
            "set cntrparam levels incremental 0.90, 0.01, 1.0",
            "set key off",
            f"set label 1 'x' at {self.ideal[0]},{self.ideal[1]} center front",
        ]
        if self.fitted is not None:
            lines.append(f"set label 2 'o' at {self.fitted[0]},{self.fitted[1]} center front")
        lines.append(f"splot '{csv_name}' every ::1 using 1:2:3 with pm3d")
        return "\n".join(lines) + "\n"


def fidelity_map(
    c_half_values: Sequence[float],
    c_twothirds_values: Sequence[float],
    fitted: tuple[float, float] | None = None,
) -> FidelityMap:
    """Evaluate :func:`cnot_report` on every grid point.

    A cell whose circuit is degenerate is stored as NaN and listed in
    ``errors`` rather than aborting the map.
    """
    ch = np.asarray(c_half_values, dtype=float)
    ct = np.asarray(c_twothirds_values, dtype=float)
    fid = np.full((ch.size, ct.size), np.nan)
    succ = np.full_like(fid, np.nan)
    errors = {}
    for i, a in enumerate(ch):
        for j, b in enumerate(ct):
            try:
                r = cnot_report(float(a), float(b))
            except DomainError as exc:
                errors[(i, j)] = str(exc)
                continue
            fid[i, j] = r.fidelity
            succ[i, j] = r.success_probability
    return FidelityMap(ch, ct, fid, succ, fitted=fitted, errors=errors)


def anchored_axis(lo: float, hi: float, n: int, anchor: float) -> np.ndarray:
    """``n`` evenly spaced points inside ``[lo, hi]`` with ``anchor`` on the grid.

    The spacing is shrunk just enough from ``(hi - lo)/(n - 1)`` to put the
    anchor exactly on a grid point, so maxima at the anchor are sampled.
    """
    if n < 2 or not lo < hi:
        raise DomainError("need n >= 2 and lo < hi")
    if not lo <= anchor <= hi:
        return np.linspace(lo, hi, n)
    step = (hi - lo) / (n - 1)
    k = int(np.clip(round((anchor - lo) / step), 0, n - 1))
    cands = []
    if k > 0:
        cands.append((anchor - lo) / k)
    if k < n - 1:
        cands.append((hi - anchor) / (n - 1 - k))
    step = min(cands)
    return anchor + (np.arange(n) - k) * step


def ideal_grid_map(
    c_half_range: tuple[float, float] = (0.4, 0.6),
    c_twothirds_range: tuple[float, float] = (0.55, 0.78),
    n: int = 100,
    fitted: tuple[float, float] | None = None,
) -> FidelityMap:
    """Fidelity map on ``n x n`` axes anchored on the ideal ratios."""
    return fidelity_map(
        anchored_axis(*c_half_range, n, 0.5),
        anchored_axis(*c_twothirds_range, n, 2.0 / 3.0),
        fitted,
    )
