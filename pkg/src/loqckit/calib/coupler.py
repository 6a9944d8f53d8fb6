"""Coupling and offset lengths from splitting ratios of coupler sweeps."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from loqckit.calib.lsq import FitResult, least_squares
from loqckit.calib.sweep import SweepDataset
from loqckit.components import CouplerCurve, CouplerModel
from loqckit.errors import DomainError, FitError, IdentifiabilityError

AVERAGING_WINDOW_NM = 2.0


def cross_ratio(through: SweepDataset, cross: SweepDataset, lam_nm: float,
                window_nm: float = AVERAGING_WINDOW_NM) -> float:
    """Normalized cross power ``Pc/(Pc+Pt)`` averaged over ``lam_nm +/- window/2``."""
    lam = through.wavelength
    pt = through.linear()
    pc = np.interp(lam, cross.wavelength, cross.linear())
    keep = np.abs(lam - lam_nm) <= window_nm / 2.0
    if not np.any(keep):
        raise DomainError(f"no samples within {window_nm} nm of {lam_nm} nm")
    total = pt[keep] + pc[keep]
    if np.any(total <= 0):
        raise DomainError("zero total output power")
    return float(np.mean(pc[keep] / total))


def _model(L, ell_c, ell_0):
    return np.sin(0.5 * np.pi * (L + ell_0) / ell_c) ** 2


def _grid_start(L, C, ell_c_guess):
    span = float(L.max() - L.min())
    if ell_c_guess is not None:
        lc = np.linspace(0.5 * ell_c_guess, 1.5 * ell_c_guess, 201)
    else:
        lc = np.geomspace(span / 8.0, 8.0 * span, 600)
    phi = np.linspace(0.0, np.pi, 180, endpoint=False)
    theta = 0.5 * np.pi * L[None, None, :] / lc[:, None, None] + phi[None, :, None]
    sse = np.sum((np.sin(theta) ** 2 - C[None, None, :]) ** 2, axis=2)
    i, j = np.unravel_index(np.argmin(sse), sse.shape)
    ell_c = float(lc[i])
    return ell_c, float(phi[j] * 2.0 * ell_c / np.pi)


def fit_coupler_sweep(
    points: Sequence[tuple[float, float]],
    lam_nm: float = 1554.0,
    ell_c_guess: float | None = None,
) -> FitResult:
    """Fit ``(ell_c, ell_0)`` to ``(L_int, C)`` pairs measured at one wavelength.

    The start point comes from a coarse grid over coupling length and
    offset phase, which also covers the first-maximum heuristic; the
    optional ``ell_c_guess`` narrows that grid to +/-50 %. ``ell_0`` is
    reported in ``(-ell_c, ell_c]``.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("points must be (L_int, C) pairs")
    L, C = arr[:, 0], arr[:, 1]
    if len(np.unique(L)) < 3:
        raise FitError("need at least three distinct interaction lengths")
    if np.ptp(C) < 1e-9:
        raise IdentifiabilityError("all splitting ratios are equal; ell_c and ell_0 not identifiable")

    lc0, l00 = _grid_start(L, C, ell_c_guess)

    def res(p):
        return _model(L, p[0], p[1]) - C

    fit = least_squares(res, [lc0, l00], names=["ell_c", "ell_0"], x_scale=[lc0, lc0])
    ell_c = abs(fit.params["ell_c"])
    ell_0 = fit.params["ell_0"] * math.copysign(1.0, fit.params["ell_c"])
    ell_0 = ell_0 - 2.0 * ell_c * math.floor((ell_0 + ell_c) / (2.0 * ell_c))
    if ell_0 <= -ell_c:
        ell_0 += 2.0 * ell_c
    fit.params = {"ell_c": ell_c, "ell_0": ell_0}
    fit.extras["lambda_nm"] = lam_nm
    fit.extras["n_points"] = int(L.size)
    return fit


def coupler_model(fit: FitResult) -> CouplerModel:
    return CouplerModel(fit.params["ell_c"], fit.params["ell_0"],
                        lambda_nm=fit.extras.get("lambda_nm", 1554.0))


def fit_coupler_dispersion(
    devices: Sequence[tuple[float, SweepDataset, SweepDataset]],
    wavelengths: Sequence[float],
    window_nm: float = AVERAGING_WINDOW_NM,
) -> tuple[CouplerCurve, list[FitResult]]:
    """Repeat the sweep fit per wavelength.

    ``devices`` holds ``(L_int, through, cross)`` for every coupler. Each
    fit after the first starts from its predecessor's coupling length.
    """
    fits = []
    guess = None
    for lam in wavelengths:
        pts = [(L, cross_ratio(t, c, lam, window_nm)) for L, t, c in devices]
        fit = fit_coupler_sweep(pts, lam, guess)
        guess = fit.params["ell_c"]
        fits.append(fit)
    curve = CouplerCurve(
        tuple(float(w) for w in wavelengths),
        tuple(f.params["ell_c"] for f in fits),
        tuple(f.params["ell_0"] for f in fits),
    )
    return curve, fits
