import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loqckit import synth
from loqckit.calib import SweepDataset, disambiguate_linewidths, find_resonances, fit_ring, ring_params
from loqckit.components import RingParams, ring_transmission
from loqckit.errors import DomainError, NoResonanceError

TRUE = synth.default_ring()


def rel(fit, name):
    return abs(fit[name] - getattr(TRUE, name)) / abs(getattr(TRUE, name))


def test_noiseless_recovery():
    fit = fit_ring(synth.synth_ring(noise=0.0))
    assert fit.converged
    for name in ("lambda0", "w_int", "w_c", "T0", "F_c", "lambda_fp", "FSR_fp"):
        assert rel(fit, name) < 1e-6, name


def test_noisy_recovery_within_five_percent():
    fit = fit_ring(synth.synth_ring())
    assert fit.converged
    for name in ("lambda0", "w_int", "w_c", "T0", "F_c", "FSR_fp"):
        assert rel(fit, name) < 0.05, name
    assert fit.extras["q_int"] == pytest.approx(TRUE.lambda0 / TRUE.w_int, rel=0.05)


def test_swapped_linewidths_fit_identically():
    swapped = RingParams(**{**TRUE.__dict__, "w_int": TRUE.w_c, "w_c": TRUE.w_int})
    a = fit_ring(synth.synth_ring())
    b = fit_ring(synth.synth_ring(swapped))
    assert a.residual_norm == pytest.approx(b.residual_norm, rel=1e-9)
    assert a["w_int"] == pytest.approx(b["w_int"], rel=1e-6)


def test_flat_data_has_no_resonance():
    lam = np.linspace(1550, 1552, 500)
    with pytest.raises(NoResonanceError):
        fit_ring(SweepDataset(lam, np.full_like(lam, 0.8)))


def test_window_and_db_input():
    ds = synth.synth_ring(noise=0.0)
    db = SweepDataset(ds.wavelength, 10 * np.log10(ds.value), scale="dB")
    fit = fit_ring(db, window=(1550.5, 1553.5))
    assert fit["lambda0"] == pytest.approx(TRUE.lambda0, abs=1e-6)


def test_ring_params_round_trip():
    fit = fit_ring(synth.synth_ring(noise=0.0))
    p = ring_params(fit)
    lam = np.linspace(1551, 1553, 50)
    assert np.allclose(ring_transmission(lam, p), ring_transmission(lam, TRUE), atol=1e-8)


def test_find_resonances():
    p = RingParams(1550.0, 0.01, 0.01, 1.0)
    lam = np.linspace(1548, 1556, 4001)
    y = ring_transmission(lam, p) * ring_transmission(lam, RingParams(1554.0, 0.01, 0.02, 1.0))
    assert find_resonances(SweepDataset(lam, y)) == pytest.approx([1550.0, 1554.0], abs=0.003)


class TestDisambiguate:
    def test_example_pairs(self):
        a = disambiguate_linewidths([(400, (60, 6.6)), (700, (7.3, 6.4))])
        assert a.w_int == (6.6, 6.4)
        assert a.w_c == (60, 7.3)
        assert a.mean_w_int == pytest.approx(6.5)
        assert a.monotone

    def test_needs_two_devices(self):
        with pytest.raises(DomainError):
            disambiguate_linewidths([(400, (60, 6.6))])

    def test_equal_pairs_zero_variance(self):
        a = disambiguate_linewidths([(400, (5, 5)), (500, (5, 5)), (600, (5, 5))])
        assert a.w_int_variance == 0

    def test_order_independent(self):
        pairs = [(700, (6.4, 7.3)), (400, (6.6, 60)), (550, (20, 6.5))]
        a = disambiguate_linewidths(pairs)
        assert a.gaps == (400, 550, 700) and a.w_c == (60, 20, 7.3)

    def test_non_monotone_warns(self):
        with pytest.warns(UserWarning):
            a = disambiguate_linewidths([(400, (1, 1)), (700, (9, 9))])
        assert not a.monotone

    def test_no_warning_when_monotone(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            disambiguate_linewidths([(400, (60, 6.6)), (700, (7.3, 6.4))])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(1.0, 100.0), min_size=2, max_size=6, unique=True),
       st.floats(0.5, 10.0), st.lists(st.booleans(), min_size=6, max_size=6))
def test_disambiguation_restores_labels(w_c_values, w_int, flips):
    w_c = sorted(w_c_values, reverse=True)  # strictly decreasing with gap
    gaps = [300 + 100 * i for i in range(len(w_c))]
    pairs = [(g, (c, w_int) if f else (w_int, c)) for g, c, f in zip(gaps, w_c, flips)]
    a = disambiguate_linewidths(pairs)
    assert a.w_c == tuple(w_c)
    assert a.w_int_variance == pytest.approx(0.0, abs=1e-20)
