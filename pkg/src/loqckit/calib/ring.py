"""Ring-resonance fits and coupling/internal linewidth assignment."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from loqckit.calib.lsq import FitResult, least_squares
from loqckit.calib.sweep import SweepDataset
from loqckit.components import RingParams, fringe_envelope, lorentz_dip
from loqckit.errors import DomainError, FitError, NoResonanceError

RING_PARAM_NAMES = ("lambda0", "w_int", "w_c", "T0", "F_c", "lambda_fp", "FSR_fp")
_MIN_FRINGE_PERIODS = 1.5


def _half_depth_width(lam, y_norm, i0, depth):
    """Full width where the normalized dip crosses half of its depth."""
    level = 1.0 - depth / 2.0
    left = i0
    while left > 0 and y_norm[left] < level:
        left -= 1
    right = i0
    while right < len(lam) - 1 and y_norm[right] < level:
        right += 1

    def cross(i, j):
        # linear interpolation of the crossing between samples i (outside) and j (inside)
        yi, yj = y_norm[i], y_norm[j]
        if yi == yj:
            return lam[i]
        return lam[j] + (level - yj) * (lam[i] - lam[j]) / (yi - yj)

    lo = cross(left, min(left + 1, i0)) if left < i0 else lam[i0]
    hi = cross(right, max(right - 1, i0)) if right > i0 else lam[i0]
    width = hi - lo
    if width <= 0:
        width = np.median(np.diff(lam))
    return float(width)


def _fringe_guess(lam, y, keep):
    """Period, peak wavelength, contrast and level of the background fringes.

    Returns ``None`` when the window holds too few fringe periods.
    """
    lam_k, y_k = lam[keep], y[keep]
    span = lam[-1] - lam[0]
    grid = np.linspace(lam[0], lam[-1], len(lam))
    yg = np.interp(grid, lam_k, y_k)
    spec = np.abs(np.fft.rfft(yg - yg.mean()))
    if len(spec) < 4:
        return None
    k = int(np.argmax(spec[1:]) + 1)
    if 0 < k < len(spec) - 1:
        a, b, c = spec[k - 1], spec[k], spec[k + 1]
        denom = a - 2 * b + c
        kf = k + (0.5 * (a - c) / denom if denom != 0 else 0.0)
    else:
        kf = float(k)
    step = grid[1] - grid[0]
    period = len(grid) * step / kf
    if span / period < _MIN_FRINGE_PERIODS:
        return None
    ph = 2 * np.pi * lam_k / period
    X = np.column_stack([np.ones_like(lam_k), np.cos(ph), np.sin(ph)])
    (a0, bc, bs), *_ = np.linalg.lstsq(X, y_k, rcond=None)
    amp = math.hypot(bc, bs)
    lam_peak = period * math.atan2(bs, bc) / (2 * np.pi)
    center = 0.5 * (lam[0] + lam[-1])
    lam_peak += period * round((center - lam_peak) / period)
    F = 2 * amp / max(a0 - amp, 1e-12 * a0)
    return period, lam_peak, F, a0 + amp


def fit_ring(
    data: SweepDataset,
    window: tuple[float, float] | None = None,
    min_depth: float = 0.03,
    fit_fringes: bool = True,
) -> FitResult:
    """Fit the fringe-times-Lorentzian model to one resonance.

    The two linewidths enter the model symmetrically, so the fit cannot tell
    them apart; the smaller is reported as ``w_int`` and the larger as
    ``w_c``. Use :func:`disambiguate_linewidths` across devices with
    different gaps to settle the labeling.

    Raises:
        NoResonanceError: the dip is shallower than ``min_depth`` relative
            to the background.
    """
    ds = data.as_linear()
    if window is not None:
        ds = ds.window(*window)
    lam, y = ds.wavelength, ds.value
    if lam.size < 10:
        raise FitError("need at least 10 samples in the fit window")

    i0 = int(np.argmin(y))
    bg_level = float(np.percentile(y, 90))
    if bg_level <= 0:
        raise NoResonanceError("no transmitted power in window")
    depth0 = 1.0 - y[i0] / bg_level
    if depth0 < min_depth:
        raise NoResonanceError(f"dip depth {depth0:.3g} below threshold {min_depth}")
    w_tot = _half_depth_width(lam, y / bg_level, i0, depth0)

    span = lam[-1] - lam[0]
    half_mask = min(10 * w_tot, 0.25 * span)
    keep = np.abs(lam - lam[i0]) > half_mask

    fringe = _fringe_guess(lam, y, keep) if fit_fringes else None
    center = 0.5 * (lam[0] + lam[-1])
    if fringe is not None:
        period, lam_fp, F, T0 = fringe

        def bg_res(p):
            return fringe_envelope(lam[keep], p[0], abs(p[1]), center + p[2], p[3]) - y[keep]

        bg = least_squares(bg_res, [T0, F, lam_fp - center, period],
                           x_scale=[T0, max(F, 1e-2), period, period])
        T0, F, fp_off, period = (bg.params[k] for k in ("p0", "p1", "p2", "p3"))
        F = abs(F)
        background = fringe_envelope(lam, T0, F, center + fp_off, period)
    else:
        T0 = float(np.median(y[keep]))
        F, fp_off, period = 0.0, 0.0, 1.0
        background = np.full_like(lam, T0)

    yn = y / background
    depth = 1.0 - yn[i0]
    if depth < min_depth:
        raise NoResonanceError(f"dip depth {depth:.3g} below threshold {min_depth}")
    w_tot = _half_depth_width(lam, yn, i0, depth)
    root = math.sqrt(max(1.0 - min(depth, 1.0), 0.05**2))
    w_a, w_b = 0.5 * w_tot * (1 + root), 0.5 * w_tot * (1 - root)
    lam_ref = float(lam[i0])

    if fringe is not None:
        names = ["T0", "F_c", "fp_off", "FSR_fp", "l0_off", "w_a", "w_b"]
        x0 = [T0, F, fp_off, period, 0.0, w_a, w_b]
        scale = [T0, max(F, 1e-2), period, period, w_tot, w_tot, w_tot]

        def res(p):
            env = fringe_envelope(lam, p[0], abs(p[1]), center + p[2], p[3])
            return env * lorentz_dip(lam, lam_ref + p[4], abs(p[5]), abs(p[6])) - y
    else:
        names = ["T0", "l0_off", "w_a", "w_b"]
        x0 = [T0, 0.0, w_a, w_b]
        scale = [T0, w_tot, w_tot, w_tot]

        def res(p):
            return p[0] * lorentz_dip(lam, lam_ref + p[1], abs(p[2]), abs(p[3])) - y

    fit = least_squares(res, x0, names=names, x_scale=scale)
    p, u = fit.params, fit.uncertainties
    wa, wb = abs(p["w_a"]), abs(p["w_b"])
    (w_int, u_int), (w_c, u_c) = sorted([(wa, u["w_a"]), (wb, u["w_b"])])
    params = {
        "lambda0": lam_ref + p["l0_off"],
        "w_int": w_int,
        "w_c": w_c,
        "T0": p["T0"],
        "F_c": abs(p["F_c"]) if fringe is not None else 0.0,
        "lambda_fp": float(center + p["fp_off"] if fringe is not None else center),
        "FSR_fp": p["FSR_fp"] if fringe is not None else 1.0,
    }
    unc = {
        "lambda0": u["l0_off"],
        "w_int": u_int,
        "w_c": u_c,
        "T0": u["T0"],
        "F_c": u.get("F_c", 0.0),
        "lambda_fp": u.get("fp_off", 0.0),
        "FSR_fp": u.get("FSR_fp", 0.0),
    }
    fit.params, fit.uncertainties = params, unc
    fit.extras["fringes_fitted"] = fringe is not None
    fit.extras["q_int"] = params["lambda0"] / params["w_int"]
    return fit


def ring_params(fit: FitResult) -> RingParams:
    return RingParams(**{k: fit.params[k] for k in RING_PARAM_NAMES})


def find_resonances(ds: SweepDataset, min_depth: float = 0.03, min_separation: float = 0.5):
    """Wavelengths of local transmission minima at least ``min_depth`` deep.

    A crude scanner for picking fit windows; depth is measured against the
    maximum within ``min_separation`` of each candidate.
    """
    lam, y = ds.wavelength, ds.linear()
    out = []
    order = np.argsort(y)
    taken = np.zeros(len(y), dtype=bool)
    for i in order:
        if taken[i]:
            continue
        near = np.abs(lam - lam[i]) < min_separation
        local_max = y[near].max()
        if local_max <= 0 or 1 - y[i] / local_max < min_depth:
            taken[near] = True
            continue
        out.append(float(lam[i]))
        taken[near] = True
    return sorted(out)


@dataclass(frozen=True)
class LinewidthAssignment:
    gaps: tuple[float, ...]
    w_c: tuple[float, ...]
    w_int: tuple[float, ...]
    mean_w_int: float
    w_int_variance: float
    monotone: bool


def disambiguate_linewidths(
    fits: Sequence[tuple[float, Sequence[float]]],
) -> LinewidthAssignment:
    """Label each device's linewidth pair as (coupling, internal).

    Every one of the ``2**n`` labelings is tried. Among those whose coupling
    linewidth does not increase with the gap, the one with the smallest
    variance of the internal linewidth wins. If no labeling is monotone the
    best-variance labeling is returned with a warning. Results are ordered
    by gap.
    """
    if len(fits) < 2:
        raise DomainError("need at least two devices to assign linewidths")
    rows = sorted((float(g), tuple(float(w) for w in pair)) for g, pair in fits)
    gaps = [g for g, _ in rows]
    if len(set(gaps)) < 2:
        raise DomainError("need at least two distinct gaps")
    for _, pair in rows:
        if len(pair) != 2:
            raise DomainError("each device needs exactly two linewidths")

    best = None
    best_any = None
    for choice in itertools.product((0, 1), repeat=len(rows)):
        w_int = [pair[c] for (_, pair), c in zip(rows, choice)]
        w_c = [pair[1 - c] for (_, pair), c in zip(rows, choice)]
        var = float(np.var(w_int))
        monotone = all(
            w_c[i + 1] <= w_c[i] for i in range(len(rows) - 1) if gaps[i + 1] > gaps[i]
        )
        cand = (var, w_c, w_int, monotone)
        if best_any is None or var < best_any[0]:
            best_any = cand
        if monotone and (best is None or var < best[0]):
            best = cand
    if best is None:
        warnings.warn("no labeling makes the coupling linewidth non-increasing in gap",
                      stacklevel=2)
        best = best_any
    var, w_c, w_int, monotone = best
    return LinewidthAssignment(tuple(gaps), tuple(w_c), tuple(w_int),
                               float(np.mean(w_int)), var, monotone)
