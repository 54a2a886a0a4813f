import numpy as np
import pytest

from ddshape.modulation import SequencePlan, f_l_numeric, shaped_modulation
from ddshape.quantum import SIGMA_X, sigma_phi
from ddshape.shaper import (
    FOutOfRange,
    ShapedPulse,
    SingularEndpoint,
    _omega_from_f,
    beta_analytic,
    envelope_area,
    modulation_profile,
    overlap_closed_forms,
    refine_beta,
    verify_overlap,
)

TWO_PI = 2.0 * np.pi


def gaps_only_weight(l: int, t_pi: float, period: float) -> float:
    """Harmonic weight of the +-1 stretches alone (pulse windows excluded).

    Independent closed form used as the bisection target: when the window
    overlap vanishes, the full f_l must equal this value.
    """
    w = l * TWO_PI / period
    t1 = 0.25 * period - 0.5 * t_pi
    t2 = 0.25 * period + 0.5 * t_pi
    t3 = 0.75 * period - 0.5 * t_pi
    t4 = 0.75 * period + 0.5 * t_pi
    parts = (
        (np.sin(w * t1) - np.sin(0.0))
        - (np.sin(w * t3) - np.sin(w * t2))
        + (np.sin(w * period) - np.sin(w * t4))
    )
    return 2.0 / period * parts / w


def beta_bisection_oracle(alpha: int, gamma: float, l: int, period: float) -> float:
    """Solve 'window overlap = 0' for beta by plain bisection on f_l_numeric.

    Completely independent of the library's beta machinery: the objective
    compares the full quadrature f_l against the gaps-only closed form.
    """
    t_pi = alpha * period / l
    target = gaps_only_weight(l, t_pi, period)
    plan = SequencePlan(period=period, t_pi=t_pi)

    def objective(beta: float) -> float:
        profile = lambda u: modulation_profile(u, t_pi, alpha, beta, gamma)
        mod = shaped_modulation(plan, profile, oscillations=2.0 * alpha)
        return f_l_numeric(mod, l) - target

    lo, hi = 0.0, 1.0
    f_lo = objective(lo)
    while objective(hi) * f_lo > 0.0:
        hi *= 2.0
        if hi > 1e3:
            raise AssertionError("oracle failed to bracket")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if objective(mid) * f_lo > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestAnsatz:
    def test_window_boundaries(self):
        t_pi = 0.47e-6
        assert modulation_profile(0.0, t_pi, 30, 0.0847, 10.0) == pytest.approx(1.0)
        assert modulation_profile(t_pi, t_pi, 30, 0.0847, 10.0) == pytest.approx(-1.0, abs=1e-9)

    def test_midpoint_even_alpha(self):
        t_pi = 1.0
        for alpha in (2, 8, 30):
            value = modulation_profile(0.5, t_pi, alpha, 0.3, 10.0)
            assert value == pytest.approx(0.0, abs=1e-12)


class TestBeta:
    def test_reference_value(self):
        assert beta_analytic(30, 10.0) == pytest.approx(0.0847, abs=2e-4)

    def test_against_bisection_oracle(self):
        beta_oracle = beta_bisection_oracle(30, 10.0, 63, period=1.0)
        assert beta_oracle == pytest.approx(0.0846818, abs=2e-6)  # frozen from the oracle
        assert beta_analytic(30, 10.0) == pytest.approx(beta_oracle, rel=1e-3)

    def test_small_alpha_against_oracle(self):
        beta_oracle = beta_bisection_oracle(8, 10.0, 31, period=1.0)
        assert beta_analytic(8, 10.0) == pytest.approx(beta_oracle, rel=1e-3)

    def test_vanishing_gamma_limit(self):
        assert beta_analytic(30, 1e-4) < 1e-4
        assert beta_analytic(30, 1e-4) == pytest.approx(
            4 * np.sqrt(2) * 1e-4 * 30 / ((4 * 900 - 1) * np.pi**1.5), rel=1e-12
        )

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            beta_analytic(0, 10.0)
        with pytest.raises(ValueError):
            beta_analytic(30, -1.0)


class TestOverlap:
    def test_zero_beta_leakage_closed_form(self):
        # without the Gaussian correction the window leaks the carrier term
        alpha, l, period = 1, 11, 1.0
        t_pi = alpha * period / l
        residual = verify_overlap(t_pi, alpha, 0.0, 10.0, l, period)
        expected = 1.0 / (3.0 * np.pi) + 1.0 / np.pi
        assert abs(residual) == pytest.approx(expected, rel=1e-9)

    def test_analytic_beta_residual(self):
        period = 1.0
        t_pi = 30.0 / 63.0 * period
        beta = beta_analytic(30, 10.0)
        residual = verify_overlap(t_pi, 30, beta, 10.0, 63, period)
        assert abs(residual) <= 1e-3

    def test_refined_beta_residual(self):
        period = 1.0
        t_pi = 30.0 / 63.0 * period
        beta = refine_beta(30, 10.0, t_pi, 63, period)
        residual = verify_overlap(t_pi, 30, beta, 10.0, 63, period)
        assert abs(residual) <= 1e-9

    def test_quadrature_convergence_at_least_quadratic(self):
        period, alpha, l = 1.0, 30, 63
        t_pi = alpha * period / l
        beta = beta_analytic(alpha, 10.0)
        converged = verify_overlap(t_pi, alpha, beta, 10.0, l, period, n_panels=8192)
        errors = []
        for n in (64, 128, 256, 512):
            value = verify_overlap(t_pi, alpha, beta, 10.0, l, period, n_panels=n)
            errors.append(abs(value - converged))
        for coarse, fine in zip(errors, errors[1:]):
            if coarse < 1e-12:
                break
            assert fine <= coarse / 4.0 or fine < 1e-12

    def test_closed_form_pair(self):
        t_pi = 0.47e-6
        i_carrier, i_gauss = overlap_closed_forms(1, 10.0, t_pi)
        assert i_carrier == pytest.approx(t_pi * (1 / (3 * np.pi) + 1 / np.pi), rel=1e-12)
        c = t_pi / 10.0
        i_c30, i_g30 = overlap_closed_forms(30, 10.0, t_pi)
        assert i_g30 == pytest.approx(c * np.sqrt(np.pi / 2.0), rel=1e-9)
        assert i_c30 / i_g30 == pytest.approx(beta_analytic(30, 10.0), rel=1e-12)


class TestEnvelope:
    def test_zero_beta_constant_envelope(self):
        t_pi = 1.0
        u = np.linspace(1e-4, t_pi - 1e-4, 4001)
        omega = _omega_from_f(u, t_pi, 30, 0.0, 10.0)
        assert np.allclose(omega, np.pi / t_pi, rtol=1e-9)

    def test_reference_peak_alpha30(self, two_protons_1p5t):
        omega_bar = np.mean([f.omega_n for f in two_protons_1p5t.frames])
        pulse = ShapedPulse.design(30, 10.0, 63, TWO_PI * 63 / omega_bar)
        assert pulse.t_pi == pytest.approx(0.4696e-6, rel=1e-3)
        assert pulse.peak_rabi / TWO_PI / 1e6 == pytest.approx(6.4, rel=0.05)

    def test_reference_peak_alpha8(self, two_tone_signal):
        omega_bar = np.mean([f for _, f in two_tone_signal.components])
        pulse = ShapedPulse.design(8, 10.0, 31, TWO_PI * 31 / omega_bar)
        assert pulse.peak_rabi / TWO_PI / 1e6 == pytest.approx(8.12, rel=0.05)

    def test_pulse_area_is_pi(self):
        for alpha, l in ((30, 63), (8, 31), (4, 27)):
            pulse = ShapedPulse.design(alpha, 10.0, l, period=1.0e-6)
            assert pulse.area == pytest.approx(np.pi, abs=1e-6)

    def test_area_quadrature_stable_under_refinement(self):
        t_pi = 30.0 / 63.0 * 1e-6
        beta = beta_analytic(30, 10.0)
        for points in (16384, 32768, 65536):
            area = envelope_area(t_pi, 30, beta, 10.0, core_points=points)
            assert area == pytest.approx(np.pi, abs=1e-6)

    def test_derivative_vs_finite_differences(self):
        pulse = ShapedPulse.design(30, 10.0, 63, period=1.0e-6)
        t_pi = pulse.t_pi
        u = np.linspace(0.02 * t_pi, 0.98 * t_pi, 200001)
        theta = np.arccos(pulse.profile(u))
        fd = (theta[2:] - theta[:-2]) / (u[2] - u[0])
        analytic = pulse.rabi(u[1:-1])
        assert np.max(np.abs(analytic - fd)) < 1e-6 * pulse.peak_rabi

    def test_signed_envelope_flags_non_monotone_f(self):
        pulse = ShapedPulse.design(30, 10.0, 63, period=1.0e-6)
        interior = pulse.omega[1:-1]
        assert pulse.monotone_envelope == bool(np.all(interior > 0.0))
        # sign changes in Omega exactly where F is locally non-monotonic,
        # yet the accumulated angle stays exactly pi (area test above)
        df = np.diff(pulse.f_z)
        assert (df > 0).any() == (interior < 0).any()

    def test_grid_endpoints_use_carrier_value(self):
        pulse = ShapedPulse.design(8, 10.0, 31, period=1.0e-6)
        assert pulse.omega[0] == pytest.approx(np.pi / pulse.t_pi)
        assert pulse.omega[-1] == pytest.approx(np.pi / pulse.t_pi)

    def test_out_of_range_combination_rejected(self):
        with pytest.raises(FOutOfRange):
            ShapedPulse.design(1, 10.0, 27, period=1.0e-6)

    def test_singular_grazing_point_detected(self):
        # alpha=1, gamma=10 has |F| > 1 regions; F crosses -1 transversally.
        # Locate the crossing and evaluate right next to it.
        t_pi = 1.0
        beta = beta_analytic(1, 10.0)
        u = np.linspace(0.0, t_pi, 200001)
        f = modulation_profile(u, t_pi, 1, beta, 10.0)
        idx = int(np.argmax(f < -1.0))
        lo, hi = u[idx - 1], u[idx]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if modulation_profile(mid, t_pi, 1, beta, 10.0) > -1.0:
                lo = mid
            else:
                hi = mid
        with pytest.raises(SingularEndpoint):
            _omega_from_f(np.array([0.5 * (lo + hi)]), t_pi, 1, beta, 10.0)

    def test_simulated_pulse_is_pi_rotation(self):
        from ddshape import kernels

        pulse = ShapedPulse.design(30, 10.0, 63, period=1.0e-6)
        n_steps = 65536
        dt = pulse.t_pi / n_steps
        mids = (np.arange(n_steps) + 0.5) * dt
        amps = pulse.rabi(mids)
        h_stack = 0.5 * amps[:, None, None] * sigma_phi(0.7)[None, :, :]
        u = kernels.propagate_steps(h_stack, np.full(n_steps, dt), backend="numpy")
        target = np.cos(np.pi / 2) * np.eye(2) - 1j * np.sin(np.pi / 2) * sigma_phi(0.7)
        fidelity = abs(np.trace(target.conj().T @ u)) / 2.0
        assert fidelity >= 1.0 - 1e-6


class TestDesignValidation:
    def test_geometry_bounds(self):
        with pytest.raises(ValueError):
            ShapedPulse.design(30, 10.0, 59, period=1.0)  # t_pi > T/2
        with pytest.raises(ValueError):
            ShapedPulse.design(-3, 10.0, 63, period=1.0)

    def test_from_duration_equivalent(self):
        p1 = ShapedPulse.design(8, 10.0, 31, period=1.0e-6)
        p2 = ShapedPulse.from_duration(8, 10.0, 31, t_pi=p1.t_pi)
        assert p2.period == pytest.approx(p1.period, rel=1e-12)
        assert p2.beta == p1.beta

    def test_refined_flag_recorded(self):
        p = ShapedPulse.design(8, 10.0, 31, period=1.0e-6, refine=True)
        assert p.refined
        assert abs(p.overlap_residual) <= 1e-9
