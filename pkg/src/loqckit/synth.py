"""Seeded synthetic measurements from the forward models.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``; the same seed
and arguments always give the same arrays. Power noise is multiplicative
log-normal, ``P * exp(sigma * N(0, 1))``.

Default device values mimic the reported silicon-nitride devices where those
are known. Fringe periods, arm-length differences and the grating-coupler
passband shape are not reported and are arbitrary choices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from loqckit import units
from loqckit.calib.insertion import CalibrationRun, DutRun
from loqckit.calib.sweep import SweepDataset
from loqckit.components import CouplerModel, RingParams, cross_power, default_coupler_model, ring_transmission
from loqckit.lincircuit import CouplerSpec, Netlist, PhaseShiftSpec, cnot_transmission, compile_netlist

DEFAULT_SEED = 1554
DEFAULT_POWER_NOISE = 0.005


def rng(seed: int = DEFAULT_SEED) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _noisy(values, sigma, gen):
    values = np.asarray(values, dtype=float)
    if sigma <= 0:
        return values
    return values * np.exp(sigma * gen.standard_normal(values.shape))


def default_ring() -> RingParams:
    return RingParams(lambda0=1552.0, w_int=0.00665, w_c=0.020, T0=0.9,
                      F_c=0.1, lambda_fp=1551.3, FSR_fp=1.6)


def synth_ring(params: RingParams | None = None, lam_min: float = 1548.0,
               lam_max: float = 1556.0, step: float = 0.001,
               noise: float = DEFAULT_POWER_NOISE, seed: int = DEFAULT_SEED,
               device: str = "ring") -> SweepDataset:
    p = params or default_ring()
    lam = np.arange(round((lam_max - lam_min) / step) + 1) * step + lam_min
    y = _noisy(ring_transmission(lam, p), noise, rng(seed))
    return SweepDataset(lam, y, device, "through")


def default_lengths(n: int = 22, L_max: float = 50.0) -> np.ndarray:
    return np.linspace(0.0, L_max, n)


def synth_coupler_sweep(model: CouplerModel | None = None, lengths=None,
                        noise: float = 0.01, seed: int = DEFAULT_SEED) -> list[tuple[float, float]]:
    """``(L_int, C)`` pairs with additive Gaussian noise of std ``noise`` on C."""
    m = model or default_coupler_model()
    L = default_lengths() if lengths is None else np.asarray(lengths, dtype=float)
    C = np.asarray(cross_power(L, m), dtype=float)
    if noise > 0:
        C = np.clip(C + noise * rng(seed).standard_normal(C.shape), 0.0, 1.0)
    return [(float(a), float(b)) for a, b in zip(L, C)]


def synth_coupler_devices(model: CouplerModel | None = None, lengths=None,
                          lam_min: float = 1544.0, lam_max: float = 1564.0, step: float = 0.05,
                          noise: float = DEFAULT_POWER_NOISE, seed: int = DEFAULT_SEED):
    """Through/cross sweeps of a set of couplers; the model is linearized in wavelength."""
    m = model or default_coupler_model()
    L = default_lengths() if lengths is None else np.asarray(lengths, dtype=float)
    lam = np.arange(round((lam_max - lam_min) / step) + 1) * step + lam_min
    lc = m.ell_c + m.d_ell_c_d_lambda * (lam - m.lambda_nm)
    l0 = m.ell_0 + m.d_ell_0_d_lambda * (lam - m.lambda_nm)
    gen = rng(seed)
    out = []
    for i, Li in enumerate(L):
        C = np.sin(0.5 * np.pi * (Li + l0) / lc) ** 2
        t = _noisy(1.0 - C, noise, gen)
        c = _noisy(C, noise, gen)
        out.append((float(Li), SweepDataset(lam, t, f"dc{i}", "through"),
                    SweepDataset(lam, c, f"dc{i}", "cross")))
    return out


def mzi_netlist(delta_phi: float, C: float, coupled: bool = True) -> Netlist:
    """Two unbalanced MZIs, modes ``(L_outer, L_inner, R_inner, R_outer)``.

    ``delta_phi`` is the inner-minus-outer propagation phase of both
    interferometers; with ``coupled`` a coupler joins the inner arms.
    """
    phases = (PhaseShiftSpec(1, delta_phi), PhaseShiftSpec(2, delta_phi))
    stages = [phases]
    if coupled:
        stages.append((CouplerSpec(C, 1, 2),))
    return Netlist(4, tuple(stages), ("L_outer", "L_inner", "R_inner", "R_outer"))


def synth_mzi(C: float = 0.5, period: float = 6.0, lam_min: float = 1530.0,
              lam_max: float = 1570.0, step: float = 0.02, lam_ref: float = 1550.0,
              coupled: bool = True, noise: float = DEFAULT_POWER_NOISE,
              seed: int = DEFAULT_SEED) -> tuple[SweepDataset, SweepDataset]:
    """Output intensities of the left and right interferometer.

    The arm phase difference grows linearly, ``2 pi (lambda - lam_ref)/period``,
    a dispersion-free stand-in for unknown arm lengths. In the coupled
    device the right inner arm is fed only through the coupler.
    """
    lam = np.arange(round((lam_max - lam_min) / step) + 1) * step + lam_min
    a_in = np.array([0.5, 0.5, 0.0 if coupled else 0.5, 0.5], dtype=complex)
    left = np.empty_like(lam)
    right = np.empty_like(lam)
    for k, w in enumerate(lam):
        S = compile_netlist(mzi_netlist(2 * np.pi * (w - lam_ref) / period, C, coupled))
        b = S @ a_in
        left[k] = abs(b[0] + b[1]) ** 2 / 2
        right[k] = abs(b[3] + b[2]) ** 2 / 2
    gen = rng(seed)
    return (SweepDataset(lam, _noisy(left, noise, gen), "mzi", "left"),
            SweepDataset(lam, _noisy(right, noise, gen), "mzi", "right"))


@dataclass(frozen=True)
class InsertionTruth:
    T1_db: np.ndarray
    T3_db: np.ndarray
    T4_db: np.ndarray
    Y_db: np.ndarray
    loss_db: np.ndarray
    C: np.ndarray


def port_profiles_db(lam, port_split_db: float = 1.0, Y_db: float = -0.8):
    """Smooth grating-coupler passbands (dB) with port 3 above port 4 by ``port_split_db``."""
    x = (np.asarray(lam) - 1550.0) / 15.0
    base = -32.0 - 3.0 * x**2 + 0.4 * x**3
    return (base, base + port_split_db / 2, base - port_split_db / 2,
            np.full_like(base, Y_db) + 0.05 * x)


def synth_insertion(n_devices: int = 22, loss_db: float = 0.06, loss_spread_db: float = 0.0,
                    port_split_db: float = 1.0, Y_db: float = -0.8,
                    lam_min: float = 1530.0, lam_max: float = 1570.0, step: float = 0.1,
                    noise: float = DEFAULT_POWER_NOISE, seed: int = DEFAULT_SEED):
    """Calibration and device sweeps for the insertion-loss procedure.

    Device splitting ratios follow the default coupler model for interaction
    lengths from 0 to 50 um. Each device's true loss is ``loss_db`` plus
    Gaussian scatter of ``loss_spread_db``.
    """
    gen = rng(seed)
    lam = np.arange(round((lam_max - lam_min) / step) + 1) * step + lam_min
    T1, T3, T4, Y = port_profiles_db(lam, port_split_db, Y_db)
    lin = units.from_db

    def ds(values_db, device, port):
        return SweepDataset(lam, _noisy(lin(values_db), noise, gen), device, port)

    calib = [
        CalibrationRun(1, "reference", ds(T1, "cal1", "1")),
        CalibrationRun(2, "reference", ds(Y + T1, "cal2", "1")),
        CalibrationRun(2, "through", ds(Y + T3, "cal2", "3")),
        CalibrationRun(3, "reference", ds(Y + T1, "cal3", "1")),
        CalibrationRun(3, "cross", ds(Y + T4, "cal3", "4")),
    ]
    L = default_lengths(n_devices)
    C = np.asarray(cross_power(L, default_coupler_model()), dtype=float)
    losses = loss_db + loss_spread_db * gen.standard_normal(n_devices)
    duts = []
    for i in range(n_devices):
        eta = lin(-losses[i])
        name = f"dc{i:02d}"
        duts.append(DutRun(
            name,
            ds(Y + T1, name, "1"),
            SweepDataset(lam, _noisy(lin(Y + T3) * eta * (1 - C[i]), noise, gen), name, "3"),
            SweepDataset(lam, _noisy(lin(Y + T4) * eta * C[i], noise, gen), name, "4"),
        ))
    return calib, duts, InsertionTruth(T1, T3, T4, Y, losses, C)


def synth_cnot_matrix(c_half: float = 0.477, c_twothirds: float = 0.676,
                      mean_abs_noise: float = 0.0, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Logical power matrix with additive Gaussian noise of the given mean magnitude."""
    M = cnot_transmission(c_half, c_twothirds)
    if mean_abs_noise > 0:
        sigma = mean_abs_noise * np.sqrt(np.pi / 2)
        M = np.clip(M + sigma * rng(seed).standard_normal(M.shape), 0.0, 1.0)
    return M
