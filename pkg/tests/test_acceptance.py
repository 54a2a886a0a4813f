"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one ``[PASS]`` line (run with ``pytest -s`` to see them);
a failed assertion marks the corresponding criterion red.  Scan grids are
desk-scale (the criteria fix dip depth and shape, not point density).
"""

import time

import numpy as np
import pytest

from ddshape import kernels
from ddshape.metrics import build_energy_report, pulse_energy
from ddshape.model import (
    GAMMA_H,
    build_classical_hamiltonian,
    build_sim_hamiltonian,
    Drive,
)
from ddshape.modulation import (
    SequencePlan,
    f_l_instantaneous,
    f_l_numeric,
    f_l_tophat,
    instantaneous_modulation,
    required_alpha,
    tophat_modulation,
)
from ddshape.quantum import ID2, SIGMA_X, check_hermitian, expectation, sigma_phi, tensor
from ddshape.shaper import ShapedPulse, beta_analytic, refine_beta, verify_overlap
from ddshape.simulator import (
    Instantaneous,
    TopHat,
    evolve,
    predict_signal,
    run_sequence,
    scan_spectrum,
    sequence_unitary,
)

TWO_PI = 2.0 * np.pi


def report(name: str, detail: str, elapsed: float | None = None) -> None:
    suffix = f" ({elapsed:.2f} s)" if elapsed is not None else ""
    print(f"[PASS] {name}: {detail}{suffix}")


def test_coefficient_exactness():
    start = time.perf_counter()
    closed_0, closed_1 = f_l_tophat(27, 0.0), f_l_tophat(27, 1.0)
    quad_0 = f_l_numeric(instantaneous_modulation(SequencePlan(1.0, 0.0)), 27)
    quad_1 = f_l_numeric(tophat_modulation(SequencePlan(1.0, 1.0 / 27.0)), 27)
    for value in (closed_0, quad_0):
        assert value == pytest.approx(-0.04716, abs=1e-5)
    for value in (closed_1, quad_1):
        assert value == pytest.approx(-0.01572, abs=1e-5)

    worst = 0.0
    checked = 0
    for l in range(1, 100, 2):
        for alpha in (0.0, 0.5, 1.0, 2.0, 4.0):
            if alpha >= l / 2.0:  # pulses would overlap: geometry impossible
                continue
            plan = SequencePlan(period=1.0, t_pi=alpha / l)
            mod = (
                instantaneous_modulation(plan)
                if alpha == 0.0
                else tophat_modulation(plan)
            )
            analytic = f_l_tophat(l, alpha)
            numeric = f_l_numeric(mod, l)
            worst = max(worst, abs(numeric - analytic) / abs(analytic))
            checked += 1
    elapsed = time.perf_counter() - start
    assert worst <= 1e-6
    assert elapsed < 1.0
    report(
        "coefficient exactness",
        f"f_27(0)={closed_0:.6f}, f_27(1)={closed_1:.6f}, "
        f"worst rel dev {worst:.1e} over {checked} (l, alpha) pairs",
        elapsed,
    )


def test_power_relation():
    omega_cap = TWO_PI * 10e6
    a2 = required_alpha(2.0, GAMMA_H, omega_cap)
    a5 = required_alpha(5.0, GAMMA_H, omega_cap)
    assert a2 == pytest.approx(4.26, abs=0.01)
    assert a5 == pytest.approx(10.65, abs=0.01)
    report("power relation", f"alpha(2 T)={a2:.4f}, alpha(5 T)={a5:.4f}")


def test_shaped_pulse_synthesis(two_protons_1p5t):
    start = time.perf_counter()
    omega_bar = np.mean([f.omega_n for f in two_protons_1p5t.frames])
    period = TWO_PI * 63 / omega_bar
    t_pi = 30 * period / 63

    beta0 = beta_analytic(30, 10.0)
    residual_analytic = verify_overlap(t_pi, 30, beta0, 10.0, 63, period)
    assert abs(residual_analytic) <= 1e-3

    beta_star = refine_beta(30, 10.0, t_pi, 63, period, beta0=beta0)
    residual_refined = verify_overlap(t_pi, 30, beta_star, 10.0, 63, period)
    assert abs(residual_refined) <= 1e-9

    pulse = ShapedPulse.design(30, 10.0, 63, period)
    assert pulse.area == pytest.approx(np.pi, abs=1e-6)
    assert pulse.peak_rabi == pytest.approx(TWO_PI * 6.4e6, rel=0.05)

    # pi-rotation fidelity of the simulated pulse (drive Hamiltonian alone)
    n_steps = 8192
    dt = pulse.t_pi / n_steps
    mids = (np.arange(n_steps) + 0.5) * dt
    h_stack = 0.5 * pulse.rabi(mids)[:, None, None] * sigma_phi(0.0)[None, :, :]
    u = kernels.propagate_steps(h_stack, np.full(n_steps, dt), backend="numpy")
    target = -1j * sigma_phi(0.0)  # exact pi rotation
    fidelity = abs(np.trace(target.conj().T @ u)) / 2.0
    assert fidelity >= 1.0 - 1e-6

    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    report(
        "shaped-pulse synthesis",
        f"residuals {abs(residual_analytic):.1e}/{abs(residual_refined):.1e}, "
        f"area-pi={pulse.area - np.pi:+.1e}, peak={pulse.peak_rabi / TWO_PI / 1e6:.3f} MHz, "
        f"fidelity={fidelity:.9f}",
        elapsed,
    )


def test_single_proton_spectrum(single_proton_2t):
    start = time.perf_counter()
    frame = single_proton_2t.frames[0]
    k, n_periods = 27, 560  # 1120 pulses
    centre = frame.omega_n / k
    omega_ms = np.unique(
        np.concatenate(
            [np.linspace(centre - TWO_PI * 2.5e3, centre + TWO_PI * 2.5e3, 21), [centre]]
        )
    )
    idx_res = int(np.argmin(np.abs(omega_ms - centre)))
    t_f = n_periods * TWO_PI / centre
    assert t_f == pytest.approx(177e-6, rel=5e-3)

    inst = scan_spectrum(single_proton_2t, Instantaneous(), k, n_periods, omega_ms)
    pred_inst = predict_signal(f_l_instantaneous(k), frame.a_perp, t_f, kind="nuclear")
    dev_inst = abs(inst.sigma_x[idx_res] - pred_inst)
    assert dev_inst <= 0.02

    tophat = scan_spectrum(
        single_proton_2t, TopHat(omega=TWO_PI * 42e6), k, n_periods, omega_ms
    )
    pred_tophat = predict_signal(f_l_tophat(k, 1.0), frame.a_perp, t_f, kind="nuclear")
    dev_tophat = abs(tophat.sigma_x[idx_res] - pred_tophat)
    assert dev_tophat <= 0.02

    # dip shape: minimum sits on resonance and the wings recover
    for scan in (inst, tophat):
        depth = 1.0 - scan.sigma_x[idx_res]
        assert int(np.argmin(scan.sigma_x)) == idx_res
        assert scan.sigma_x[0] > scan.sigma_x[idx_res] + 0.5 * depth
        assert scan.sigma_x[-1] > scan.sigma_x[idx_res] + 0.5 * depth

    elapsed = time.perf_counter() - start
    report(
        "single-proton spectrum (1120 pulses)",
        f"on-resonance dev: instantaneous {dev_inst:.4f} (pred {pred_inst:.4f}), "
        f"top-hat 42 MHz {dev_tophat:.4f} (pred {pred_tophat:.4f})",
        elapsed,
    )


def _two_proton_grid(system, l, margin_hz, n_lin):
    res = sorted(frame.omega_n / l for frame in system.frames)
    lo = res[0] - TWO_PI * margin_hz
    hi = res[-1] + TWO_PI * margin_hz
    return np.unique(np.concatenate([np.linspace(lo, hi, n_lin), res]))


def test_two_proton_spectrum_full(two_protons_1p5t):
    start = time.perf_counter()
    l, n_periods = 63, 720  # [XYXYYXYX]^180 = 1440 pulses
    omega_bar = np.mean([f.omega_n for f in two_protons_1p5t.frames])
    pulse = ShapedPulse.design(30, 10.0, l, TWO_PI * l / omega_bar)
    omega_ms = _two_proton_grid(two_protons_1p5t, l, margin_hz=150.0, n_lin=15)
    assert omega_ms.size >= 15

    inst = scan_spectrum(two_protons_1p5t, Instantaneous(), l, n_periods, omega_ms)
    shaped = scan_spectrum(two_protons_1p5t, pulse, l, n_periods, omega_ms)
    tophat = scan_spectrum(
        two_protons_1p5t, TopHat(omega=TWO_PI * 20e6), l, n_periods, omega_ms
    )

    pointwise = np.max(np.abs(shaped.sigma_x - inst.sigma_x))
    assert pointwise <= 0.05

    for frame in two_protons_1p5t.frames:
        idx = int(np.argmin(np.abs(omega_ms - frame.omega_n / l)))
        ideal_depth = 1.0 - inst.sigma_x[idx]
        tophat_depth = 1.0 - tophat.sigma_x[idx]
        assert ideal_depth > 0.01  # both dips are present
        assert tophat_depth <= 0.5 * ideal_depth

    elapsed = time.perf_counter() - start
    report(
        "two-proton spectrum (1440 pulses, full grid)",
        f"max |shaped - instantaneous| = {pointwise:.4f} over {omega_ms.size} points; "
        f"top-hat dips suppressed below half depth",
        elapsed,
    )


def test_two_proton_spectrum_smoke(two_protons_1p5t):
    start = time.perf_counter()
    l, n_periods = 63, 720
    w1, w2 = (frame.omega_n / l for frame in two_protons_1p5t.frames)
    omega_ms = np.sort([w1, 0.5 * (w1 + w2), w2])
    omega_bar = np.mean([f.omega_n for f in two_protons_1p5t.frames])
    pulse = ShapedPulse.design(30, 10.0, l, TWO_PI * l / omega_bar)

    inst = scan_spectrum(two_protons_1p5t, Instantaneous(), l, n_periods, omega_ms)
    shaped = scan_spectrum(two_protons_1p5t, pulse, l, n_periods, omega_ms)
    tophat = scan_spectrum(
        two_protons_1p5t, TopHat(omega=TWO_PI * 20e6), l, n_periods, omega_ms
    )
    assert np.max(np.abs(shaped.sigma_x - inst.sigma_x)) <= 0.05
    for i in (0, 2):
        assert (1.0 - tophat.sigma_x[i]) <= 0.5 * (1.0 - inst.sigma_x[i])

    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(
        "two-proton spectrum (3-point smoke)",
        f"resonances + midpoint in {elapsed:.1f} s (< 120 s)",
        elapsed,
    )


def test_two_tone_classical_spectrum(two_tone_signal):
    start = time.perf_counter()
    l, n_periods = 31, 20  # 40 pulses
    freqs = [f for _, f in two_tone_signal.components]
    omega_bar = np.mean(freqs)
    pulse = ShapedPulse.design(8, 10.0, l, TWO_PI * l / omega_bar)
    assert pulse.peak_rabi == pytest.approx(TWO_PI * 8.12e6, rel=0.05)

    res = [f / l for f in freqs]
    centre = omega_bar / l
    omega_ms = np.unique(
        np.concatenate(
            [np.linspace(centre - TWO_PI * 2e3, centre + TWO_PI * 2e3, 19), res]
        )
    )
    inst = scan_spectrum(two_tone_signal, Instantaneous(), l, n_periods, omega_ms)
    shaped = scan_spectrum(two_tone_signal, pulse, l, n_periods, omega_ms)
    tophat = scan_spectrum(
        two_tone_signal, TopHat(omega=TWO_PI * 10e6), l, n_periods, omega_ms
    )

    pointwise = np.max(np.abs(shaped.sigma_x - inst.sigma_x))
    assert pointwise <= 0.05
    ideal_depth = 1.0 - np.min(inst.sigma_x)
    tophat_depth = 1.0 - np.min(tophat.sigma_x)
    assert tophat_depth <= 0.5 * ideal_depth

    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(
        "two-tone classical spectrum (40 pulses)",
        f"max |shaped - instantaneous| = {pointwise:.4f}, "
        f"depths ideal {ideal_depth:.3f} vs top-hat {tophat_depth:.3f}, "
        f"peak={pulse.peak_rabi / TWO_PI / 1e6:.3f} MHz",
        elapsed,
    )


def test_energy_ratios(two_protons_1p5t, two_tone_signal):
    omega_bar_n = np.mean([f.omega_n for f in two_protons_1p5t.frames])
    pulse30 = ShapedPulse.design(30, 10.0, 63, TWO_PI * 63 / omega_bar_n)
    report30 = build_energy_report(pulse30, TWO_PI * 100e6)
    assert report30.peak_power_ratio == pytest.approx(244.0, rel=0.05)
    assert report30.energy_ratio == pytest.approx(27.47, rel=0.10)

    omega_bar_s = np.mean([f for _, f in two_tone_signal.components])
    pulse8 = ShapedPulse.design(8, 10.0, 31, TWO_PI * 31 / omega_bar_s)
    report8 = build_energy_report(pulse8, TWO_PI * 50e6)
    assert report8.peak_power_ratio == pytest.approx(38.0, rel=0.05)
    assert report8.energy_ratio == pytest.approx(10.63, rel=0.10)

    report(
        "energy ratios",
        f"peak power {report30.peak_power_ratio:.1f} / {report8.peak_power_ratio:.1f} "
        f"(targets 244 / 38), energy {report30.energy_ratio:.2f} / "
        f"{report8.energy_ratio:.2f} (targets 27.47 / 10.63)",
    )


def test_property_suites(single_proton_2t, two_tone_signal):
    # propagator unitarity over a long sequence
    frame = single_proton_2t.frames[0]
    period = TWO_PI * 27 / frame.omega_n
    plan = SequencePlan(period=period, t_pi=0.0, n_periods=560)
    u = sequence_unitary(single_proton_2t, plan, Instantaneous())
    unitarity = np.linalg.norm(u.conj().T @ u - np.eye(4))
    assert unitarity < 1e-8

    # Hamiltonian Hermiticity at sampled times
    drive = Drive(omega=lambda t: TWO_PI * 20e6 if t < 25e-9 else 0.0, phi=0.4)
    h_nv = build_sim_hamiltonian(single_proton_2t, drive)
    h_cl = build_classical_hamiltonian(two_tone_signal, drive)
    for t in np.linspace(0.0, 1e-7, 7):
        check_hermitian(h_nv(t), tol=1e-12)
        check_hermitian(h_cl(t), tol=1e-12)

    # analytic envelope derivative vs finite differences of arccos F
    pulse = ShapedPulse.design(30, 10.0, 63, period=1e-6)
    t_pi = pulse.t_pi
    grid = np.linspace(0.02 * t_pi, 0.98 * t_pi, 200001)
    theta = np.arccos(pulse.profile(grid))
    fd = (theta[2:] - theta[:-2]) / (grid[2] - grid[0])
    fd_dev = np.max(np.abs(pulse.rabi(grid[1:-1]) - fd)) / pulse.peak_rabi
    assert fd_dev < 1e-6

    # even-harmonic nullity
    mod = tophat_modulation(SequencePlan(period=1.0, t_pi=1.0 / 27.0))
    even_worst = max(abs(f_l_numeric(mod, l)) for l in (2, 4, 8, 26))
    assert even_worst < 1e-9

    # Richardson step halving: convergence order >= 2
    h_of_t = build_classical_hamiltonian(two_tone_signal)
    rho0 = 0.5 * (ID2 + SIGMA_X)

    def coherence(n):
        rho = evolve(h_of_t, rho0, np.linspace(0.0, 2e-6, n + 1))
        return expectation(rho, SIGMA_X)

    c1, c2, c4 = coherence(2000), coherence(4000), coherence(8000)
    assert abs(c2 - c4) < 1e-6
    assert abs(c1 - c4) / max(abs(c2 - c4), 1e-16) > 3.0

    report(
        "property suites",
        f"unitarity {unitarity:.1e}, envelope-derivative dev {fd_dev:.1e}, "
        f"even-harmonic worst {even_worst:.1e}, halving ratio "
        f"{abs(c1 - c4) / max(abs(c2 - c4), 1e-16):.1f}",
    )
