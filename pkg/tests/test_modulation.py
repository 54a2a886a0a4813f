import numpy as np
import pytest

from ddshape.model import GAMMA_H
from ddshape.modulation import (
    ModulationFunction,
    QuadratureNotConverged,
    SequencePlan,
    f_l_instantaneous,
    f_l_numeric,
    f_l_tophat,
    instantaneous_modulation,
    required_alpha,
    shaped_modulation,
    tophat_modulation,
)

TWO_PI = 2.0 * np.pi


def tophat_mod(l: int, alpha: float, period: float = 1.0) -> ModulationFunction:
    plan = SequencePlan(period=period, t_pi=alpha * period / l)
    return tophat_modulation(plan)


class TestInstantaneous:
    def test_even_harmonics_vanish(self):
        assert f_l_instantaneous(2) == 0.0
        assert f_l_instantaneous(10) == 0.0

    def test_fundamental_sign_fixed_by_quadrature_oracle(self):
        # alpha -> 0 limit of the top-hat closed form gives +4/pi at l=1;
        # the quadrature of the square wave agrees.
        plan = SequencePlan(period=1.0, t_pi=0.0)
        oracle = f_l_numeric(instantaneous_modulation(plan), 1)
        assert f_l_instantaneous(1) == pytest.approx(4.0 / np.pi, rel=1e-12)
        assert f_l_instantaneous(1) == pytest.approx(oracle, rel=1e-12)

    def test_harmonic_27(self):
        assert f_l_instantaneous(27) == pytest.approx(-4.0 / (27.0 * np.pi), rel=1e-12)
        assert f_l_instantaneous(27) == pytest.approx(-0.0472, abs=5e-5)

    def test_matches_tophat_at_zero_width(self):
        for l in (1, 3, 5, 27, 63, 99):
            assert f_l_tophat(l, 0.0) == pytest.approx(f_l_instantaneous(l), rel=1e-14)


class TestTopHatClosedForm:
    def test_reference_values(self):
        assert f_l_tophat(27, 1.0) == pytest.approx(-4.0 / (81.0 * np.pi), rel=1e-12)
        assert f_l_tophat(27, 1.0) == pytest.approx(-0.0157, abs=5e-5)
        assert f_l_tophat(27, 0.0) == pytest.approx(-0.0472, abs=5e-5)

    def test_half_width_limit_is_analytic(self):
        # removable singularity at alpha = 1/2
        value = f_l_tophat(27, 0.5)
        nearby = f_l_tophat(27, 0.5 + 1e-7)
        assert value == pytest.approx(nearby, rel=1e-5)
        plan = tophat_mod(27, 0.5)
        assert f_l_numeric(plan, 27) == pytest.approx(value, rel=1e-9)

    def test_envelope_ratio_is_alpha_independent(self):
        # f_l(alpha) * (4 alpha^2 - 1) / cos(alpha pi) is constant in alpha
        for l in (25, 27, 29):
            ref = f_l_tophat(l, 0.0) * (-1.0)
            for alpha in (0.2, 0.8, 1.3, 2.7, 4.0):
                value = f_l_tophat(l, alpha) * (4 * alpha**2 - 1) / np.cos(alpha * np.pi)
                assert value == pytest.approx(ref, rel=1e-12)

    def test_decay_envelope_matches_quadrature(self):
        # |f_l| decay over alpha in [0, 4] for l = 25, 27, 29
        for l in (25, 27, 29):
            for alpha in (0.25, 1.0, 1.75, 3.0, 4.0):
                numeric = f_l_numeric(tophat_mod(l, alpha), l)
                assert numeric == pytest.approx(f_l_tophat(l, alpha), rel=1e-9, abs=1e-12)

    def test_zeros_at_half_integer_widths(self):
        for l, alpha in ((27, 1.5), (27, 2.5), (63, 3.5)):
            assert f_l_tophat(l, alpha) == pytest.approx(0.0, abs=1e-15)
            assert abs(f_l_numeric(tophat_mod(l, alpha), l)) < 1e-8

    def test_even_l_rejected(self):
        with pytest.raises(ValueError):
            f_l_tophat(2, 1.0)


class TestNumericQuadrature:
    def test_constant_function_orthogonal(self):
        # int_0^T (+1) cos(l w_m s) ds = 0: the closed-form segment
        # integral used for the +-1 stretches is exact on a full period
        from ddshape.modulation import _constant_segment_integral

        for l in (1, 2, 27):
            value = _constant_segment_integral(1.0, 0.0, 1.0, l * TWO_PI)
            assert abs(value) < 1e-15

    def test_even_harmonic_nullity(self):
        mod = tophat_mod(27, 1.0)
        for l in (2, 4, 8, 26):
            assert abs(f_l_numeric(mod, l)) < 1e-9

    def test_parseval_partial_sum(self):
        total = sum(f_l_instantaneous(l) ** 2 / 2.0 for l in range(1, 200, 2))
        assert total == pytest.approx(1.0, rel=0.01)

    def test_quadrature_not_converged_raises(self):
        with pytest.raises(QuadratureNotConverged):
            f_l_numeric(tophat_mod(27, 1.0), 27, max_refinements=0)

    def test_shaped_profile_restores_ideal_weight(self):
        from ddshape.shaper import ShapedPulse

        for l, alpha in ((63, 30), (31, 8), (27, 4)):
            pulse = ShapedPulse.design(alpha, 10.0, l, period=1.0, refine=True)
            plan = SequencePlan(period=1.0, t_pi=pulse.t_pi)
            mod = shaped_modulation(plan, pulse.profile, oscillations=2.0 * alpha)
            value = f_l_numeric(mod, l)
            # a window holding an integer number of target oscillations
            # reproduces the zero-width weight up to the (-1)^alpha parity
            expected = (-1.0) ** alpha * f_l_instantaneous(l)
            assert value == pytest.approx(expected, abs=1e-6)


class TestModulationFunction:
    def test_values_bounded_and_continuous(self):
        from ddshape.shaper import ShapedPulse

        pulse = ShapedPulse.design(4, 10.0, 27, period=1.0)
        plan = SequencePlan(period=1.0, t_pi=pulse.t_pi)
        mod = shaped_modulation(plan, pulse.profile, oscillations=8.0)
        t = np.linspace(0.0, 1.0, 20001)
        values = mod.evaluate(t)
        assert np.max(np.abs(values)) <= 1.0 + 1e-12
        # steepest slope is ~(pi/t_pi)(1 + 2 alpha beta); no O(1) edge jumps
        assert np.max(np.abs(np.diff(values))) < 0.02
        t1, t2, t3, t4 = mod.window_edges
        assert mod.evaluate(np.array([t1]))[0] == pytest.approx(1.0, abs=1e-12)
        assert mod.evaluate(np.array([t2]))[0] == pytest.approx(-1.0, abs=1e-12)
        assert mod.evaluate(np.array([t3]))[0] == pytest.approx(-1.0, abs=1e-12)
        assert mod.evaluate(np.array([t4]))[0] == pytest.approx(1.0, abs=1e-12)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            SequencePlan(period=1.0, t_pi=0.5)
        with pytest.raises(ValueError):
            SequencePlan(period=1.0, t_pi=0.1, phase_pattern="XZ")
        with pytest.raises(ValueError):
            SequencePlan(period=-1.0, t_pi=0.0)

    def test_alpha_definition(self):
        plan = SequencePlan(period=1.0, t_pi=30.0 / 63.0)
        assert plan.alpha(63) == pytest.approx(30.0)
        assert plan.window_edges[0] == pytest.approx(0.25 - 15.0 / 63.0)


class TestRequiredAlpha:
    def test_reference_fields(self):
        omega_cap = TWO_PI * 10e6
        assert required_alpha(2.0, GAMMA_H, omega_cap) == pytest.approx(4.26, abs=0.01)
        assert required_alpha(5.0, GAMMA_H, omega_cap) == pytest.approx(10.65, abs=0.01)

    def test_instantaneous_limit(self):
        assert required_alpha(2.0, GAMMA_H, 1e15) < 1e-6

    def test_positive_inputs_required(self):
        with pytest.raises(ValueError):
            required_alpha(-1.0, GAMMA_H, 1.0)
