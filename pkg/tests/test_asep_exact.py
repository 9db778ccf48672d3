import math

import numpy as np
import pytest

from halfline_bethe.asep_exact import (AsepEvalReport, LatticeConfig,
                                       default_radii, evaluate_extended,
                                       master_equation_residual, prob_fullline,
                                       prob_halfline, prob_n1_closed,
                                       total_mass, tuned_radii,
                                       _pole_images_inside)
from halfline_bethe.contour_quad import QuadOptions
from halfline_bethe.oracles import ctmc_prob
from halfline_bethe.scattering import AsepParams

P04 = AsepParams.from_p(0.4)


class TestConfigs:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            LatticeConfig((2, 2))
        with pytest.raises(ValueError):
            LatticeConfig((3, 1))

    def test_halfline_nonnegative(self):
        with pytest.raises(ValueError):
            prob_halfline((-1, 2), (0, 3), 1.0, P04)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            prob_halfline(tuple(range(5)), tuple(range(5)), 1.0, P04)


class TestRadii:
    def test_default_radii_symmetric_case(self):
        # p = q = 1/2: center 1, scale 8, radii (9, 10) for two particles
        scheme = default_radii(AsepParams.from_p(0.5), 2)
        assert scheme.center == pytest.approx(1.0)
        assert scheme.radii == pytest.approx((9.0, 10.0))

    @pytest.mark.parametrize("n", range(1, 7))
    @pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
    def test_radii_distinct_and_poles_inside(self, n, p):
        params = AsepParams.from_p(p)
        for scheme in (default_radii(params, n), tuned_radii(params, min(n, 4))):
            assert all(b > a for a, b in zip(scheme.radii, scheme.radii[1:]))
            center = scheme.center.real
            for pole in (0.0, 1.0, params.tau):
                assert abs(pole - center) < scheme.radii[0]

    def test_tuned_radii_image_containment(self):
        for p in (0.3, 0.5, 0.7):
            params = AsepParams.from_p(p)
            scheme = tuned_radii(params, 3)
            assert _pole_images_inside(params, scheme.radii, safety=0.76)

    def test_p_zero_rejected(self):
        with pytest.raises(ValueError):
            default_radii(AsepParams.from_p(0.0), 1)


class TestN1Closed:
    def test_delta(self):
        assert prob_n1_closed(2, 2, 0.0, P04).value == pytest.approx(1.0, abs=1e-12)
        assert prob_n1_closed(2, 4, 0.0, P04).value == pytest.approx(0.0, abs=1e-12)

    def test_matches_signed_sum(self):
        for (y, x, t) in [(0, 0, 1.0), (1, 3, 0.5), (4, 0, 2.0)]:
            a = prob_n1_closed(y, x, t, P04).value
            b = prob_halfline((y,), (x,), t, P04).value
            assert abs(a - b) < 1e-10

    @pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
    def test_matches_birth_death_oracle(self, t):
        params = AsepParams.from_p(0.3)
        for y in (0, 2, 5):
            for x in (0, 1, 5):
                exact = prob_n1_closed(y, x, t, params).value
                ref = ctmc_prob((y,), (x,), t, params)
                assert abs(exact - ref) < 1e-8


class TestHalfline:
    def test_delta_initial_condition(self):
        assert prob_halfline((0, 2), (0, 2), 0.0, P04).value == \
            pytest.approx(1.0, abs=1e-10)
        assert abs(prob_halfline((0, 2), (1, 3), 0.0, P04).value) < 1e-10

    def test_n2_oracle_example(self):
        rep = prob_halfline((0, 2), (1, 3), 1.0, P04)
        ref = ctmc_prob((0, 2), (1, 3), 1.0, P04)
        assert abs(rep.value - ref) < 1e-6
        assert rep.imag_residual < 1e-10
        assert rep.value >= -1e-8
        assert rep.term_count == 2 * 8

    def test_report_fields(self):
        rep = prob_halfline((0,), (1,), 0.5, P04)
        assert isinstance(rep, AsepEvalReport)
        assert rep.points_used >= 16
        assert rep.error_estimate < 1e-9

    def test_reversed_orientation_consistency(self):
        # deep-tail arguments route through the reversibility identity
        far = prob_halfline((0, 2), (11, 14), 1.0, P04).value
        ref = ctmc_prob((0, 2), (11, 14), 1.0, P04, tol=1e-16)
        assert abs(far - ref) < 1e-10

    def test_contour_invariance(self):
        base = tuned_radii(P04, 2)
        ref = prob_halfline((0, 2), (1, 3), 1.0, P04).value
        scaled = prob_halfline((0, 2), (1, 3), 1.0, P04,
                               radii=base.scaled(1.1)).value
        spread = prob_halfline((0, 2), (1, 3), 1.0, P04,
                               radii=base.gaps_doubled()).value
        assert abs(scaled - ref) < 1e-8
        assert abs(spread - ref) < 1e-8

    def test_mass_at_t_zero_is_single_term(self):
        assert abs(total_mass((0, 2), 0.0, P04, 8) - 1.0) < 1e-10

    def test_mass_n1(self):
        assert abs(total_mass((0,), 1.0, P04, 30) - 1.0) < 1e-8

    def test_mass_n2(self):
        assert abs(total_mass((0, 2), 0.5, P04, 16) - 1.0) < 1e-6

    def test_adaptive_error_estimate_quality(self):
        # refinement history of the two-particle integrand: monotone
        # successive differences, and the reported estimate bounds the true
        # error within a factor of 10 (deep refinement as reference)
        from halfline_bethe.asep_exact import _halfline_sum
        from halfline_bethe.contour_quad import adaptive_trace

        radii = tuned_radii(P04, 2)

        def level(m):
            return _halfline_sum((0, 2), (1, 3), 1.0, P04, radii, m)

        trace = adaptive_trace(level, QuadOptions(initial_points=16,
                                                  max_points=4096, tol=1e-5))
        diffs = [abs(b[1] - a[1]) for a, b in zip(trace, trace[1:])]
        assert all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))
        estimate = diffs[-1]
        deep = adaptive_trace(level, QuadOptions(initial_points=64,
                                                 max_points=4096,
                                                 tol=1e-13))[-1][1]
        true_err = abs(trace[-1][1] - deep)
        assert true_err <= 10.0 * estimate

    def test_nonconvergence_signalled(self):
        from halfline_bethe.errors import ConvergenceError
        with pytest.raises(ConvergenceError):
            prob_halfline((0, 2), (1, 3), 1.0, P04,
                          opts=QuadOptions(initial_points=8, max_points=8))


class TestFullline:
    def test_delta(self):
        assert prob_fullline((-1, 2), (-1, 2), 0.0, P04).value == \
            pytest.approx(1.0, abs=1e-10)

    def test_n1_biased_walk(self):
        # closed form: e^{-t} (p/q)^((x-y)/2) I_{x-y}(2 sqrt(pq) t)
        from scipy.special import iv
        t, y, x = 1.5, 0, 2
        expected = math.exp(-t) * (P04.p / P04.q) ** ((x - y) / 2) \
            * iv(x - y, 2 * math.sqrt(P04.p * P04.q) * t)
        got = prob_fullline((y,), (x,), t, P04).value
        assert abs(got - expected) < 1e-12
        ref = ctmc_prob((y,), (x,), t, P04, halfline=False)
        assert abs(got - ref) < 1e-8

    def test_n2_vs_ctmc(self):
        got = prob_fullline((0, 2), (-1, 3), 1.0, P04).value
        ref = ctmc_prob((0, 2), (-1, 3), 1.0, P04, halfline=False)
        assert abs(got - ref) < 1e-6


class TestExtended:
    def test_physical_agreement(self):
        a = evaluate_extended((0, 2), (1, 3), 0.7, P04)
        b = prob_halfline((0, 2), (1, 3), 0.7, P04).value
        assert abs(a - b) < 1e-10
        assert abs(a.imag) < 1e-10

    def test_boundary_collision_identity(self):
        # p u(x,x) + q u(x+1,x+1) - u(x,x+1) = 0
        for x in (1, 3):
            lhs = (P04.p * evaluate_extended((0, 2), (x, x), 0.7, P04)
                   + P04.q * evaluate_extended((0, 2), (x + 1, x + 1), 0.7, P04)
                   - evaluate_extended((0, 2), (x, x + 1), 0.7, P04))
            assert abs(lhs) < 1e-8

    def test_wall_identity(self):
        # u(0, x2) = tau u(-1, x2)
        lhs = evaluate_extended((0, 2), (0, 4), 0.7, P04) \
            - P04.tau * evaluate_extended((0, 2), (-1, 4), 0.7, P04)
        assert abs(lhs) < 1e-8


class TestMasterEquation:
    def test_n1_at_wall(self):
        assert master_equation_residual((0,), (0,), 1.0, P04) < 1e-8

    def test_n2_adjacent_pair(self):
        assert master_equation_residual((0, 2), (3, 4), 1.0, P04) < 1e-8

    def test_n2_separated_pair(self):
        assert master_equation_residual((0, 2), (1, 4), 1.0, P04) < 1e-8

    def test_requires_positive_time(self):
        with pytest.raises(ValueError):
            master_equation_residual((0,), (1,), 0.0, P04)
