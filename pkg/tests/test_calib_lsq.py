import numpy as np
import pytest

from loqckit.calib.lsq import FitResult, least_squares, numeric_jacobian, scaled_gradient
from loqckit.errors import DomainError


def test_linear_model_exact():
    x = np.linspace(-2, 3, 40)
    y = 1.7 * x - 0.4
    fit = least_squares(lambda p: p[0] * x + p[1] - y, [0.0, 0.0], names=["a", "b"])
    assert fit.converged
    assert fit["a"] == pytest.approx(1.7, abs=1e-10)
    assert fit["b"] == pytest.approx(-0.4, abs=1e-10)


def test_quadratic_one_parameter_closed_form():
    # r(p) = (p - 3, 2 (p - 1)); minimum of (p-3)^2 + 4 (p-1)^2 at p = 7/5
    fit = least_squares(lambda p: np.array([p[0] - 3, 2 * (p[0] - 1)]), [10.0])
    assert fit["p0"] == pytest.approx(1.4, abs=1e-10)
    assert fit.residual_norm == pytest.approx(np.sqrt(0.4**2 * 4 + 1.6**2), abs=1e-10)


def test_nonlinear_exponential_with_analytic_jacobian():
    t = np.linspace(0, 4, 60)
    y = 2.5 * np.exp(-1.3 * t)

    def res(p):
        return p[0] * np.exp(-p[1] * t) - y

    def jac(p):
        e = np.exp(-p[1] * t)
        return np.column_stack([e, -p[0] * t * e])

    fit = least_squares(res, [1.0, 0.5], jac=jac)
    assert fit.converged
    assert [fit["p0"], fit["p1"]] == pytest.approx([2.5, 1.3], abs=1e-9)


def test_uncertainties_match_linear_theory():
    rng = np.random.default_rng(3)
    x = np.linspace(0, 1, 200)
    y = 2 * x + 1 + 0.01 * rng.standard_normal(x.size)
    fit = least_squares(lambda p: p[0] * x + p[1] - y, [0, 0])
    X = np.column_stack([x, np.ones_like(x)])
    coef, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    s2 = res[0] / (x.size - 2)
    cov = s2 * np.linalg.inv(X.T @ X)
    assert fit.covariance == pytest.approx(cov, rel=1e-6)
    assert [fit["p0"], fit["p1"]] == pytest.approx(coef, abs=1e-10)


def test_converged_implies_small_gradient():
    x = np.linspace(0, 5, 50)
    y = np.sin(1.2 * x) + 0.05 * np.cos(7 * x)
    fit = least_squares(lambda p: np.sin(p[0] * x) - y, [1.0])
    assert fit.converged and fit.gradient_norm < 1e-5


def test_singular_problem_not_converged():
    x = np.linspace(0, 1, 10)
    fit = least_squares(lambda p: (p[0] + p[1]) * x - 2 * x, [0.3, 0.1])
    assert not fit.converged
    assert "singular" in fit.message


def test_nan_residual_is_input_error():
    with pytest.raises(DomainError):
        least_squares(lambda p: np.array([np.nan, p[0]]), [1.0])


def test_deterministic():
    x = np.linspace(0, 3, 30)
    y = np.exp(-0.7 * x)
    a = least_squares(lambda p: np.exp(-p[0] * x) - y, [0.1])
    b = least_squares(lambda p: np.exp(-p[0] * x) - y, [0.1])
    assert a.to_dict() == b.to_dict()


def test_numeric_jacobian():
    f = lambda p: np.array([p[0] ** 2, p[0] * p[1]])  # noqa: E731
    J = numeric_jacobian(f, np.array([2.0, 3.0]))
    assert J == pytest.approx(np.array([[4.0, 0.0], [3.0, 2.0]]), rel=1e-8)


def test_scaled_gradient_is_unit_free():
    J = np.array([[1.0], [0.0]])
    r = np.array([0.0, 5.0])
    assert scaled_gradient(J, r) == 0.0
    assert scaled_gradient(1e6 * J, np.array([3.0, 4.0])) == pytest.approx(0.6)


def test_fit_result_json():
    fit = FitResult({"a": 1.0}, {"a": 0.1}, None, 0.0, True, 3)
    assert '"converged": true' in fit.to_json()
