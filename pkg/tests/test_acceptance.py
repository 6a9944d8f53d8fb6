"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the
measured numbers, then asserts. Run ``python3 tests/test_acceptance.py`` for
the lines alone.
"""

import itertools
import math
import time

import numpy as np
import pytest

from loqckit import synth
from loqckit.calib import (
    calibrate_insertion,
    extract_bs_phase,
    fit_cnot_transmission,
    fit_coupler_sweep,
    fit_ring,
)
from loqckit.components import (
    CouplerModel,
    cross_power_vs_ell_c,
    default_coupler_model,
    design_length,
    intrinsic_q,
    load_sensitivity_ledger,
    propagation_loss,
    sensitivity_combination,
)
from loqckit.lincircuit import cnot_netlist, cnot_logical_indices, compile_netlist, reduce_ports
from loqckit.quantum import FockState, amplitude, cnot_report, evolve_distribution, fock_states, ideal_grid_map
from oracles import random_netlist, two_photon_amplitudes

_printer = print


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _printer

    def emit(*a):
        with capsys.disabled():
            print(*a)

    _printer = emit
    yield
    _printer = print


def report(n, ok, text):
    _printer(f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {text}")
    assert ok, text


def test_1_ideal_cnot():
    t = time.perf_counter()
    r = cnot_report(0.5, 2 / 3)
    dt = time.perf_counter() - t
    ok = abs(r.fidelity - 1) <= 1e-10 and abs(r.success_probability - 1 / 9) <= 1e-10 and dt < 1
    report(1, ok, f"ideal CNOT fidelity={r.fidelity:.12f} P_ps={r.success_probability:.12f} ({dt:.3f} s)")


def test_2_fitted_device_fidelity():
    t = time.perf_counter()
    a = cnot_report(0.477, 0.676)
    b = cnot_report(0.480, 0.669)
    dt = time.perf_counter() - t
    ok = (abs(a.fidelity - 0.9981) <= 3e-4 and abs(a.success_probability - 0.1095) <= 5e-4
          and abs(b.fidelity - 0.9992) <= 3e-4 and dt < 1)
    report(2, ok, f"(0.477,0.676) F={a.fidelity:.5f} P_ps={a.success_probability:.5f}; "
                  f"(0.480,0.669) F={b.fidelity:.5f} ({dt:.3f} s)")


def test_3_ideal_transmission_matrix():
    idx = cnot_logical_indices()
    T = np.abs(reduce_ports(compile_netlist(cnot_netlist(0.5, 2 / 3)), idx, idx)) ** 2
    thirds = int(np.sum(np.abs(T - 1 / 3) <= 1e-12))
    zeros = int(np.sum(np.abs(T) <= 1e-12))
    report(3, thirds == 8 and zeros == 8, f"logical |S'|^2 has {thirds} entries of 1/3 and {zeros} zeros")


def test_4_propagation_loss_chain():
    q = intrinsic_q(1552.0, 0.00665)
    alpha, db = propagation_loss(1.9936, q, 1552.0)
    ok = abs(q - 2.33e5) <= 0.01e5 and abs(alpha - 0.35) <= 0.01 and abs(db - 1.5) <= 0.05
    report(4, ok, f"Q_int={q:.4g} alpha={alpha:.4f}/cm loss={db:.3f} dB/cm")


def test_5_coupler_sensitivity():
    m = CouplerModel(37.47, 0.0)
    L = design_length(0.5, 0, "+", m).L_int
    slope = cross_power_vs_ell_c(L, m)
    led = load_sensitivity_ledger()
    widths = sensitivity_combination([("width left waveguide", 2), ("width right waveguide", 2)], led).delta_ell_c
    slot = sensitivity_combination([("slot width", 2)], led).delta_ell_c
    etch = widths + slot
    thin = sensitivity_combination(
        [("SiN thickness", 1), ("center thickness", 1), ("remaining thickness", 1)], led).delta_ell_c
    ok = (abs(slope + 0.021) <= 0.001 and abs(etch - 2.0) <= 0.05 and abs(widths + 4.6) <= 1e-9
          and abs(slot - 6.58) <= 1e-9 and abs(thin) <= 0.05)
    report(5, ok, f"dC/dl_c={slope:.4f}/um; lateral etch {widths:+.2f}{slot:+.2f}={etch:+.2f} um; "
                  f"SiN thinning sum {thin:+.2f} um")


def test_6_two_photon_oracle():
    rng = np.random.default_rng(20240611)
    worst_amp = 0.0
    worst_norm = 0.0
    for k in range(50):
        n = int(rng.integers(4, 7))
        S = compile_netlist(random_netlist(rng, n))
        for j1, j2 in itertools.combinations_with_replacement(range(n), 2):
            ref = two_photon_amplitudes(S, j1, j2)
            inp = FockState.from_modes(n, [j1, j2])
            for out in fock_states(n, 2):
                worst_amp = max(worst_amp, abs(amplitude(S, inp, out) - ref[out.occupations]))
            worst_norm = max(worst_norm, abs(sum(evolve_distribution(S, inp).values()) - 1))
    ok = worst_amp <= 1e-12 and worst_norm <= 1e-10
    report(6, ok, f"50 netlists: max amplitude deviation {worst_amp:.2e}, max normalization error {worst_norm:.2e}")


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_7_round_trip_suite():
    lines = []
    ok = True

    truth = synth.default_ring()
    names = ("lambda0", "w_int", "w_c", "T0", "F_c", "lambda_fp", "FSR_fp")
    clean = fit_ring(synth.synth_ring(noise=0.0))
    noisy = fit_ring(synth.synth_ring())
    e0 = max(_rel(clean[k], getattr(truth, k)) for k in names)
    e1 = max(_rel(noisy[k], getattr(truth, k)) for k in names)
    ok &= e0 <= 1e-6 and e1 <= 0.05
    lines.append(f"ring {e0:.1e}/{e1:.3f}")

    m = default_coupler_model()
    clean = fit_coupler_sweep(synth.synth_coupler_sweep(noise=0.0))
    noisy = fit_coupler_sweep(synth.synth_coupler_sweep(noise=0.01))
    e0 = max(_rel(clean["ell_c"], m.ell_c), _rel(clean["ell_0"], m.ell_0))
    e1 = max(_rel(noisy["ell_c"], m.ell_c), _rel(noisy["ell_0"], m.ell_0))
    ok &= e0 <= 1e-6 and e1 <= 0.02
    lines.append(f"coupler {e0:.1e}/{e1:.3f}")

    p0 = extract_bs_phase(*synth.synth_mzi(noise=0.0)).phase
    p1 = extract_bs_phase(*synth.synth_mzi()).phase
    e0 = _rel(p0, math.pi / 2)
    ok &= e0 <= 1e-6 and abs(p1 - math.pi / 2) <= 0.02 * math.pi
    lines.append(f"mzi {e0:.1e}/{p1 / math.pi:.4f}pi")

    calib, duts, tr = synth.synth_insertion(noise=0.0)
    e0 = max(_rel(a, b) for a, b in zip(calibrate_insertion(calib, duts)[1].loss_db, tr.loss_db))
    calib, duts, _ = synth.synth_insertion(loss_db=0.0)
    worst = max(abs(v) for v in calibrate_insertion(calib, duts)[1].loss_db)
    ok &= e0 <= 1e-6 and worst <= 0.01
    lines.append(f"insertion {e0:.1e}/{worst:.4f} dB")

    clean = fit_cnot_transmission(synth.synth_cnot_matrix(0.477, 0.676))
    noisy = fit_cnot_transmission(synth.synth_cnot_matrix(0.477, 0.676, 0.02))
    e0 = max(_rel(clean["C_half"], 0.477), _rel(clean["C_twothirds"], 0.676))
    e1 = max(abs(noisy["C_half"] - 0.477), abs(noisy["C_twothirds"] - 0.676))
    ok &= e0 <= 1e-6 and e1 <= 0.01
    lines.append(f"cnot {e0:.1e}/{e1:.4f}")

    report(7, ok, "noiseless rel. error / noisy error: " + ", ".join(lines))


def test_8_fidelity_map():
    t = time.perf_counter()
    fm = ideal_grid_map(n=100)
    dt = time.perf_counter() - t
    i0 = int(np.argmin(np.abs(fm.c_half - 0.5)))
    j0 = int(np.argmin(np.abs(fm.c_twothirds - 2 / 3)))
    F = fm.fidelity
    at_max = fm.argmax() == (i0, j0) and abs(F[i0, j0] - 1) <= 1e-9
    in_range = fm.c_half.min() >= 0.4 and fm.c_half.max() <= 0.6 and fm.c_twothirds.min() >= 0.55 \
        and fm.c_twothirds.max() <= 0.78
    rays = 0
    bad = 0
    for di in range(-3, 4):
        for dj in range(-3, 4):
            if (di, dj) == (0, 0) or math.gcd(abs(di), abs(dj)) != 1:
                continue
            rays += 1
            vals = []
            i, j = i0, j0
            while 0 <= i < F.shape[0] and 0 <= j < F.shape[1]:
                vals.append(F[i, j])
                i, j = i + di, j + dj
            if np.any(np.diff(vals) > 0):
                bad += 1
    ok = dt < 10 and at_max and in_range and bad == 0 and not fm.errors
    report(8, ok, f"100x100 map in {dt:.2f} s, max {F[i0, j0]:.12f} at ({fm.c_half[i0]:.4f}, "
                  f"{fm.c_twothirds[j0]:.4f}), {rays - bad}/{rays} rays non-increasing")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
