import numpy as np
import pytest

from loqckit import synth
from loqckit.calib import coupler_model, cross_ratio, fit_coupler_dispersion, fit_coupler_sweep
from loqckit.calib.sweep import SweepDataset
from loqckit.components import CouplerModel, cross_power, default_coupler_model
from loqckit.errors import DomainError, IdentifiabilityError


def test_noiseless_exact():
    fit = fit_coupler_sweep(synth.synth_coupler_sweep(noise=0.0))
    assert fit.converged
    assert fit["ell_c"] == pytest.approx(33.7, rel=1e-8)
    assert fit["ell_0"] == pytest.approx(8.2, rel=1e-8)


def test_one_percent_noise_within_two_percent():
    fit = fit_coupler_sweep(synth.synth_coupler_sweep(noise=0.01))
    assert fit["ell_c"] == pytest.approx(33.7, rel=0.02)
    assert fit["ell_0"] == pytest.approx(8.2, rel=0.02)


@pytest.mark.parametrize("seed", range(10))
def test_noisy_recovery_is_robust_across_seeds(seed):
    fit = fit_coupler_sweep(synth.synth_coupler_sweep(noise=0.01, seed=seed))
    assert fit["ell_c"] == pytest.approx(33.7, rel=0.02)
    assert fit["ell_0"] == pytest.approx(8.2, rel=0.05)


def test_design_points_from_fitted_model():
    m = coupler_model(fit_coupler_sweep(synth.synth_coupler_sweep()))
    assert cross_power(8.5, m) == pytest.approx(0.494, abs=0.02)
    assert cross_power(12.4, m) == pytest.approx(0.666, abs=0.02)


def test_guess_does_not_change_answer():
    pts = synth.synth_coupler_sweep(noise=0.0)
    a = fit_coupler_sweep(pts)
    b = fit_coupler_sweep(pts, ell_c_guess=40.0)
    assert b["ell_c"] == pytest.approx(a["ell_c"], rel=1e-9)


def test_other_generator_parameters():
    m = CouplerModel(21.0, 3.5)
    pts = synth.synth_coupler_sweep(m, lengths=np.linspace(0, 60, 25), noise=0.0)
    fit = fit_coupler_sweep(pts)
    assert (fit["ell_c"], fit["ell_0"]) == pytest.approx((21.0, 3.5), rel=1e-8)


def test_degenerate_data():
    with pytest.raises(IdentifiabilityError):
        fit_coupler_sweep([(L, 0.4) for L in np.linspace(0, 50, 10)])
    with pytest.raises(DomainError):
        fit_coupler_sweep([(0.0, 0.1), (5.0, 0.3)])


def test_cross_ratio_averages_window():
    lam = np.linspace(1550, 1558, 801)
    t = SweepDataset(lam, np.full_like(lam, 0.3))
    c = SweepDataset(lam, np.full_like(lam, 0.1))
    assert cross_ratio(t, c, 1554.0) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        cross_ratio(t, c, 1600.0)


def test_dispersion_from_device_sweeps():
    m = default_coupler_model()
    devices = synth.synth_coupler_devices(noise=0.0)
    curve, fits = fit_coupler_dispersion(devices, [1550.0, 1554.0, 1558.0])
    assert all(f.converged for f in fits)
    at = curve.model_at(1554.0)
    assert at.ell_c == pytest.approx(m.ell_c, rel=2e-3)
    assert at.d_ell_c_d_lambda == pytest.approx(m.d_ell_c_d_lambda, rel=0.05)
