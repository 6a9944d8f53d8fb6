import math

import numpy as np
import pytest

from loqckit import synth
from loqckit.calib import SweepDataset, extract_bs_phase
from loqckit.calib.mzi import wrap_phase
from loqckit.errors import DomainError, LowContrastError

LAM = np.arange(1530.0, 1570.0, 0.02)
PERIOD = 6.0


def fringe(shift=0.0, contrast=0.4):
    return SweepDataset(LAM, 0.5 * (1 + contrast * np.cos(2 * np.pi * (LAM + shift - 1550.3) / PERIOD)))


def test_identical_fringes_give_zero():
    r = extract_bs_phase(fringe(), fringe())
    assert r.phase == pytest.approx(0.0, abs=1e-9)
    assert r.fringes.period == pytest.approx(PERIOD, rel=1e-9)


def test_quarter_period_toward_shorter_wavelength():
    # right(lam) = left(lam + P/4): the right maxima sit P/4 to the blue
    r = extract_bs_phase(fringe(), fringe(PERIOD / 4))
    assert r.phase == pytest.approx(math.pi / 2, abs=1e-9)
    r = extract_bs_phase(fringe(), fringe(-PERIOD / 4))
    assert r.phase == pytest.approx(-math.pi / 2, abs=1e-9)


def test_synthetic_coupler_device_noiseless():
    left, right = synth.synth_mzi(noise=0.0)
    assert extract_bs_phase(left, right).phase == pytest.approx(math.pi / 2, rel=1e-6)


def test_synthetic_coupler_device_noisy():
    left, right = synth.synth_mzi()
    assert extract_bs_phase(left, right).phase_over_pi == pytest.approx(0.5, abs=0.02)


def test_symmetric_device():
    left, right = synth.synth_mzi(coupled=False)
    assert extract_bs_phase(left, right).phase == pytest.approx(0.0, abs=0.02 * math.pi)


def test_low_contrast():
    with pytest.raises(LowContrastError):
        extract_bs_phase(fringe(contrast=0.01), fringe(contrast=0.01))


def test_too_few_periods():
    short = SweepDataset(LAM[:200], fringe().value[:200])
    with pytest.raises(DomainError):
        extract_bs_phase(short, short)


def test_wrap_phase():
    assert wrap_phase(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)
    assert wrap_phase(math.pi) == pytest.approx(math.pi)


def test_invariant_under_common_shift_and_scale():
    left, right = synth.synth_mzi(noise=0.0)
    base = extract_bs_phase(left, right).phase
    moved = extract_bs_phase(SweepDataset(left.wavelength + 1.7, 3 * left.value),
                             SweepDataset(right.wavelength + 1.7, 3 * right.value))
    assert moved.phase == pytest.approx(base, abs=1e-9)
