"""Deterministic Levenberg-Marquardt engine shared by every fitter.

The policy is fixed so that fits are reproducible: Marquardt diagonal
scaling with Nielsen damping updates, capped at ``max_iter`` iterations.
Iteration stops once the relative parameter step drops below ``xtol`` or
the gradient infinity-norm below ``gtol``. It also stops when no step
lowers the cost any more.

Stopping is not the same as converging. On noisy data the raw gradient at
the minimum is set by the noise and the parameter units, so it cannot be
compared with a fixed number. A stopped fit therefore counts as converged
only when its scaled gradient is below ``ctol``. The scaled gradient is the
largest cosine between the residual vector and a Jacobian column, which is
unit-free. With ``m`` residuals a cosine of ``ctol`` leaves each parameter
roughly ``ctol * sqrt(m)`` standard errors from the minimum. Running out of
iterations never counts as converged.

An RMS residual below ``RESIDUAL_FLOOR`` is treated as an exact fit and the
cosine is computed against the floor instead, because at roundoff level
the direction of the residual vector is noise. The floor assumes residuals
of order one; rescale residuals of very different magnitude.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from loqckit.errors import DomainError

XTOL = 1e-10
GTOL = 1e-12
CTOL = 1e-5
RESIDUAL_FLOOR = 1e-6
MAX_ITER = 500


@dataclass
class FitResult:
    """Outcome of a least-squares fit.

    ``params`` and ``uncertainties`` are keyed by parameter name; the
    uncertainties are one-sigma values from the covariance
    ``s^2 (J^T J)^-1`` with ``s^2`` the residual variance.
    ``gradient_norm`` is the scaled (cosine) gradient used for the
    convergence verdict.
    """

    params: dict[str, float]
    uncertainties: dict[str, float]
    covariance: np.ndarray | None
    residual_norm: float
    converged: bool
    iterations: int
    gradient_norm: float = float("nan")
    message: str = ""
    extras: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        return self.params[name]

    def to_dict(self) -> dict:
        d = {
            "parameters": dict(self.params),
            "uncertainties": dict(self.uncertainties),
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
            "message": self.message,
        }
        if self.extras:
            d["extras"] = _jsonable(self.extras)
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def numeric_jacobian(fun, x, r0=None, scale=None):
    """Central-difference Jacobian of ``fun`` at ``x``."""
    x = np.asarray(x, dtype=float)
    if scale is None:
        scale = np.maximum(np.abs(x), 1.0)
    h = 6e-6 * np.maximum(np.abs(x), scale)
    cols = []
    for j in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h[j]
        xm[j] -= h[j]
        cols.append((fun(xp) - fun(xm)) / (xp[j] - xm[j]))
    return np.column_stack(cols)


def scaled_gradient(J: np.ndarray, r: np.ndarray) -> float:
    """Largest ``|J_j . r| / (|J_j| |r|)`` over the Jacobian columns, ``|r|`` floored."""
    rn = max(float(np.linalg.norm(r)), RESIDUAL_FLOOR * math.sqrt(max(r.size, 1)))
    if J.shape[1] == 0:
        return 0.0
    cn = np.linalg.norm(J, axis=0)
    g = np.abs(J.T @ r)
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = np.where(cn > 0, g / (cn * rn), 0.0)
    return float(np.max(cos))


def least_squares(
    residuals: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    names: Sequence[str] | None = None,
    jac: Callable[[np.ndarray], np.ndarray] | None = None,
    x_scale: Sequence[float] | None = None,
    xtol: float = XTOL,
    gtol: float = GTOL,
    max_iter: int = MAX_ITER,
    ctol: float = CTOL,
) -> FitResult:
    """Minimize ``sum(residuals(x)**2)`` starting from ``x0``.

    ``jac`` defaults to a central-difference Jacobian whose step is scaled by
    ``x_scale`` (typical parameter magnitudes; pass these whenever a
    parameter may start at zero). Singular normal equations end the fit with
    ``converged=False`` and a diagnostic message.
    """
    x = np.array(x0, dtype=float)
    n = x.size
    names = list(names) if names is not None else [f"p{i}" for i in range(n)]
    if len(names) != n:
        raise DomainError("one name per parameter required")
    scale = None if x_scale is None else np.asarray(x_scale, dtype=float)

    def fun(p):
        return np.asarray(residuals(p), dtype=float).ravel()

    if jac is None:
        def jacobian(p, r):
            return numeric_jacobian(fun, p, r, scale)
    else:
        def jacobian(p, r):
            return np.asarray(jac(p), dtype=float)

    r = fun(x)
    if not np.all(np.isfinite(r)):
        raise DomainError("residuals are not finite at the initial guess")
    cost = float(r @ r)
    J = jacobian(x, r)
    A = J.T @ J
    g = J.T @ r
    mu = 1e-3 * max(float(np.max(np.diag(A))), 1e-300)
    nu = 2.0
    converged = False
    message = "maximum number of iterations reached"
    it = 0
    while it < max_iter:
        if float(np.max(np.abs(g))) < gtol:
            converged, message = True, "gradient below tolerance"
            break
        D = np.maximum(np.diag(A), 1e-12 * max(float(np.max(np.diag(A))), 1e-300))
        try:
            h = np.linalg.solve(A + mu * np.diag(D), -g)
        except np.linalg.LinAlgError:
            h = None
        if h is None or not np.all(np.isfinite(h)):
            mu *= nu
            nu *= 2.0
            if mu > 1e30:
                message = "singular normal equations"
                break
            continue
        it += 1
        small = np.linalg.norm(h) <= xtol * (np.linalg.norm(x) + xtol)
        x_new = x + h
        r_new = fun(x_new)
        cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else math.inf
        if small:
            # take the last step if it helps, then stop
            if cost_new <= cost:
                x, r = x_new, r_new
                J = jacobian(x, r)
            converged, message = True, "relative step below tolerance"
            break
        predicted = float(h @ (mu * D * h - g))
        rho = (cost - cost_new) / predicted if predicted > 0 else -1.0
        if rho > 0:
            x, r, cost = x_new, r_new, cost_new
            J = jacobian(x, r)
            A = J.T @ J
            g = J.T @ r
            mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
        else:
            mu *= nu
            nu *= 2.0
            if mu > 1e30:
                converged, message = True, "no step lowers the cost further"
                break

    return _finish(names, x, r, J, converged, it, message, ctol)


def _rank(J: np.ndarray) -> int:
    """Rank of the column-normalized Jacobian at a sqrt(eps) threshold.

    Finite-difference Jacobians of degenerate models are only rank
    deficient up to roundoff, so the default numpy threshold is too strict.
    """
    if J.shape[1] == 0:
        return 0
    cn = np.linalg.norm(J, axis=0)
    if not np.all(cn > 0):
        return int(np.linalg.matrix_rank(J[:, cn > 0])) if np.any(cn > 0) else 0
    sv = np.linalg.svd(J / cn, compute_uv=False)
    return int(np.sum(sv > math.sqrt(np.finfo(float).eps) * sv[0]))


def _finish(names, x, r, J, converged, iterations, message, ctol) -> FitResult:
    m, n = J.shape
    gnorm = scaled_gradient(J, r)
    if converged and not gnorm < ctol:
        converged = False
        message = f"{message}; scaled gradient {gnorm:.2e} exceeds {ctol:.0e}"
    rank = _rank(J)
    if rank < n:
        converged = False
        message = f"singular normal equations (Jacobian rank {rank} of {n}); {message}"
    cov = None
    unc = {k: float("nan") for k in names}
    try:
        JTJ_inv = np.linalg.inv(J.T @ J)
        dof = max(m - n, 1)
        s2 = float(r @ r) / dof
        cov = JTJ_inv * s2
        unc = {k: float(math.sqrt(max(cov[i, i], 0.0))) for i, k in enumerate(names)}
    except np.linalg.LinAlgError:
        if converged:
            message += "; covariance unavailable (singular J^T J)"
    return FitResult(
        params={k: float(v) for k, v in zip(names, x)},
        uncertainties=unc,
        covariance=cov,
        residual_norm=float(np.linalg.norm(r)),
        converged=converged,
        iterations=iterations,
        gradient_norm=gnorm,
        message=message,
    )
