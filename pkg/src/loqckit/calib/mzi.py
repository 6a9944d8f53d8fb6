"""Beam-splitter phase from the fringe shift between two unbalanced MZIs.

Each output is fitted with ``A + B cos(2 pi (lambda - lambda_max) / period)``
sharing one period. The phase difference between the cross and through
outputs of the coupler is ``2 pi (lambda_max_left - lambda_max_right) / period``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from loqckit.calib.lsq import FitResult, least_squares
from loqckit.calib.sweep import SweepDataset
from loqckit.errors import FitError, LowContrastError

MIN_CONTRAST = 0.05


@dataclass(frozen=True)
class MziFringeFit:
    period: float
    lambda_max_left: float
    lambda_max_right: float
    offset_left: float
    amplitude_left: float
    offset_right: float
    amplitude_right: float


@dataclass(frozen=True)
class BeamSplitterPhase:
    phase: float
    fringes: MziFringeFit
    fit: FitResult

    @property
    def phase_over_pi(self) -> float:
        return self.phase / math.pi


def wrap_phase(x: float) -> float:
    """Wrap to ``(-pi, pi]``."""
    w = math.remainder(x, 2.0 * math.pi)
    return math.pi if w <= -math.pi else w


def _dominant_period(datasets):
    lo = max(d.wavelength[0] for d in datasets)
    hi = min(d.wavelength[-1] for d in datasets)
    n = max(len(d) for d in datasets)
    grid = np.linspace(lo, hi, n)
    power = 0.0
    for d in datasets:
        y = np.interp(grid, d.wavelength, d.linear())
        power = power + np.abs(np.fft.rfft(y - y.mean())) ** 2
    k = int(np.argmax(power[1:]) + 1)
    if 0 < k < len(power) - 1:
        a, b, c = np.log(power[k - 1:k + 2] + 1e-300)
        denom = a - 2 * b + c
        kf = k + (0.5 * (a - c) / denom if denom != 0 else 0.0)
    else:
        kf = float(k)
    return (grid[1] - grid[0]) * n / kf, hi - lo


def _harmonic(lam, y, period, center):
    ph = 2 * np.pi * (lam - center) / period
    X = np.column_stack([np.ones_like(lam), np.cos(ph), np.sin(ph)])
    (a, bc, bs), *_ = np.linalg.lstsq(X, y, rcond=None)
    return a, math.hypot(bc, bs), period * math.atan2(bs, bc) / (2 * np.pi)


def extract_bs_phase(left: SweepDataset, right: SweepDataset,
                     min_contrast: float = MIN_CONTRAST) -> BeamSplitterPhase:
    """Phase ``angle(S'_21) - angle(S'_11)`` of a coupler between two MZIs.

    ``left`` is the interferometer fed by the coupler's through port,
    ``right`` the one fed by its cross port. Both sweeps must cover at
    least two fringe periods.
    """
    left, right = left.as_linear(), right.as_linear()
    period, span = _dominant_period([left, right])
    if span / period < 2.0:
        raise FitError(f"sweeps cover {span / period:.2f} fringe periods; need at least 2")
    center = 0.5 * (max(left.wavelength[0], right.wavelength[0])
                    + min(left.wavelength[-1], right.wavelength[-1]))

    x0 = []
    scale = []
    for d in (left, right):
        a, b, m = _harmonic(d.wavelength, d.value, period, center)
        if a <= 0 or b / a < min_contrast:
            raise LowContrastError(f"fringe contrast {b / max(a, 1e-300):.3g} below {min_contrast}")
        x0 += [a, b, m]
        scale += [a, a, period]
    x0.append(period)
    scale.append(period)
    lam_l, y_l = left.wavelength, left.value
    lam_r, y_r = right.wavelength, right.value

    def res(p):
        al, bl, ml, ar, br, mr, P = p
        rl = al + bl * np.cos(2 * np.pi * (lam_l - center - ml) / P) - y_l
        rr = ar + br * np.cos(2 * np.pi * (lam_r - center - mr) / P) - y_r
        return np.concatenate([rl / al, rr / ar])

    names = ["A_left", "B_left", "max_left", "A_right", "B_right", "max_right", "period"]
    fit = least_squares(res, x0, names=names, x_scale=scale)
    p = dict(fit.params)
    P = abs(p["period"])
    for side in ("left", "right"):
        if p[f"B_{side}"] < 0:
            p[f"B_{side}"] = -p[f"B_{side}"]
            p[f"max_{side}"] += 0.5 * P
        if p[f"B_{side}"] / p[f"A_{side}"] < min_contrast:
            raise LowContrastError(f"{side} fringe contrast below {min_contrast}")
    lam_max_l = center + p["max_left"]
    lam_max_r = center + p["max_right"]
    phase = wrap_phase(2 * np.pi * (lam_max_l - lam_max_r) / P)
    fringes = MziFringeFit(P, lam_max_l, lam_max_r, p["A_left"], p["B_left"],
                           p["A_right"], p["B_right"])
    fit.params.update({"phase": phase, "lambda_max_left": lam_max_l,
                       "lambda_max_right": lam_max_r, "period": P})
    u = fit.uncertainties
    fit.uncertainties["phase"] = 2 * np.pi * math.hypot(u["max_left"], u["max_right"]) / P
    return BeamSplitterPhase(phase, fringes, fit)
