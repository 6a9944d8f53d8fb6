"""Splitting ratios of a fabricated CNOT circuit from its transmission matrix."""

from __future__ import annotations

import numpy as np

from loqckit.calib.lsq import FitResult, least_squares
from loqckit.errors import DomainError
from loqckit.lincircuit import cnot_transmission

IDEAL = (0.5, 2.0 / 3.0)
_EPS = 1e-9


def _model(p):
    ch, ct = np.clip(p, _EPS, 1.0 - _EPS)
    return cnot_transmission(ch, ct)


def fit_cnot_transmission(measured, x0=IDEAL) -> FitResult:
    """Fit ``(C_half, C_twothirds)`` to a measured 4x4 logical power matrix.

    Rows are outputs and columns inputs, both ordered ``(c1, c0, t1, t0)``.
    Couplers of the same design share one ratio and all 16 entries carry
    equal weight, the structurally zero ones included.
    """
    M = np.asarray(measured, dtype=float)
    if M.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {M.shape}")
    if np.any(M < 0) or np.any(M > 1) or not np.all(np.isfinite(M)):
        raise DomainError("transmission entries must lie in [0, 1]")

    def res(p):
        return (_model(p) - M).ravel()

    fit = least_squares(res, list(x0), names=["C_half", "C_twothirds"], x_scale=[0.5, 0.5])
    model = _model([fit.params["C_half"], fit.params["C_twothirds"]])
    fit.extras["mean_abs_deviation"] = float(np.mean(np.abs(model - M)))
    fit.extras["deviation_from_ideal"] = float(np.mean(np.abs(model - cnot_transmission(*IDEAL))))
    fit.extras["model"] = model.tolist()
    if not fit.converged:
        fit.message += f"; residual norm {fit.residual_norm:.3g}"
    return fit
