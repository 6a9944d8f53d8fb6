import numpy as np
import pytest

from loqckit import synth
from loqckit.calib import calibrate_insertion, fit_calibration
from loqckit.calib.insertion import FUNCTIONS, summarize
from loqckit.errors import DomainError, IdentifiabilityError


def test_noiseless_recovers_loss_and_ports():
    calib, duts, truth = synth.synth_insertion(noise=0.0)
    sol, rep = calibrate_insertion(calib, duts)
    assert np.allclose(rep.loss_db, truth.loss_db, rtol=1e-6, atol=0)
    lam = np.linspace(1531, 1569, 50)
    T1, T3, T4, Y = synth.port_profiles_db(lam)
    assert np.allclose(sol.transmission_db("T_3<-2", lam) - sol.transmission_db("T_4<-2", lam), T3 - T4, atol=1e-8)
    assert np.allclose(sol.transmission_db("Y", lam), Y, atol=1e-8)


def test_lossless_chip_reads_zero_after_correction():
    calib, duts, _ = synth.synth_insertion(loss_db=0.0)
    _, rep = calibrate_insertion(calib, duts)
    assert rep.stats["mean"] == pytest.approx(0.0, abs=0.01)
    assert max(abs(v) for v in rep.loss_db) < 0.01


def test_uncorrected_loss_is_biased_by_half_a_db():
    calib, duts, _ = synth.synth_insertion(loss_db=0.0)
    _, rep = calibrate_insertion(calib, duts, correct=False)
    assert not rep.corrected
    assert max(abs(v) for v in rep.loss_db) == pytest.approx(0.5, abs=0.1)


def test_device_spread_statistics():
    calib, duts, truth = synth.synth_insertion(loss_db=0.06, loss_spread_db=0.07)
    _, rep = calibrate_insertion(calib, duts)
    assert rep.stats["n"] == 22
    assert rep.stats["mean"] == pytest.approx(0.06, abs=0.03)
    assert rep.stats["std"] == pytest.approx(np.std(truth.loss_db, ddof=1), abs=0.01)


@pytest.mark.parametrize("missing,expected", [(1, "T_1<-2"), (2, "T_3<-2"), (3, "T_4<-2")])
def test_missing_device_type_names_unresolved_functions(missing, expected):
    calib, _, _ = synth.synth_insertion(noise=0.0)
    kept = [r for r in calib if r.device_type != missing]
    with pytest.raises(IdentifiabilityError, match=expected):
        fit_calibration(kept)


def test_low_order_still_identifiable():
    calib, duts, truth = synth.synth_insertion(noise=0.0)
    _, rep = calibrate_insertion(calib, duts, order=3)
    assert np.allclose(rep.loss_db, truth.loss_db, atol=1e-2)


def test_bad_inputs():
    calib, duts, _ = synth.synth_insertion(noise=0.0)
    with pytest.raises(IdentifiabilityError):
        fit_calibration([])
    with pytest.raises(DomainError):
        fit_calibration(calib, order=-1)
    with pytest.raises(DomainError):
        calibrate_insertion(calib, duts, wavelength_range=(1600.0, 1610.0))


def test_summary_and_json():
    s = summarize([1.0, 2.0, 3.0, 4.0])
    assert s["mean"] == 2.5 and s["median"] == 2.5 and s["std"] == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
    calib, duts, _ = synth.synth_insertion(noise=0.0, n_devices=3)
    sol, rep = calibrate_insertion(calib, duts)
    assert set(sol.to_dict()["coefficients"]) == set(FUNCTIONS)
    assert len(rep.to_dict()["devices"]) == 3


def test_polynomial_log_data_fits_exactly():
    calib, _, _ = synth.synth_insertion(noise=0.0)
    assert fit_calibration(calib, order=3).residual_rms < 1e-12
