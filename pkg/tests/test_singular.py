import numpy as np
import pytest
from numpy.testing import assert_allclose

from pitaron_lab.singular_dynamics import (
    SmearedDelta,
    StepFunction,
    comb_expansion_terms,
    comb_pitaron_expansion,
    comb_truncated_norm,
    dominated_convergence_demos,
    smeared_second_order,
)

DIMB_STRENGTHS = [0.6, 1.0, 1.2, 0.8]
DIMB_TIMES = [1.0, 2.0, 3.0, 4.0]


class TestStepFunction:
    def test_right_continuous_at_jumps(self):
        step = StepFunction(base=0.0, jumps=((1.0, 0.5), (2.0, 0.25)))
        assert step(0.999) == 0.0
        assert step(1.0) == 0.5  # jump counts from its own instant
        assert step(1.5) == 0.5
        assert step(2.0) == 0.75

    def test_base_offset(self):
        step = StepFunction(base=2.0, jumps=((0.5, -1.0),))
        assert step(0.0) == 2.0
        assert step(0.5) == 1.0

    def test_rejects_unordered_jumps(self):
        with pytest.raises(ValueError, match="increasing"):
            StepFunction(base=0.0, jumps=((2.0, 1.0), (1.0, 1.0)))


class TestSmearedDelta:
    @pytest.mark.parametrize("kind", ["nascent", "gaussian", "causal"])
    @pytest.mark.parametrize("eps", [1e-3, 1e-2, 1e-1])
    def test_unit_mass(self, kind, eps):
        delta = SmearedDelta(kind=kind, epsilon=eps, center=0.7)
        assert abs(delta.numeric_mass() - 1.0) < 1e-6

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            SmearedDelta(kind="triangle", epsilon=0.1, center=0.0)

    def test_rejects_non_positive_width(self):
        with pytest.raises(ValueError, match="positive"):
            SmearedDelta(kind="gaussian", epsilon=0.0, center=0.0)

    def test_causal_density_is_one_sided(self):
        delta = SmearedDelta(kind="causal", epsilon=0.1, center=1.0)
        assert delta.density(0.99) == 0.0
        assert delta.density(1.0) == pytest.approx(10.0)
        assert delta.density(1.1) == pytest.approx(10.0 * np.exp(-1.0))


class TestCombTruncatedNorm:
    def test_unity_before_first_kick(self):
        assert comb_truncated_norm(DIMB_STRENGTHS, DIMB_TIMES, 0.5) == 1.0

    def test_figure_staircase_values(self):
        values = [comb_truncated_norm(DIMB_STRENGTHS, DIMB_TIMES, t) for t in (1.0, 2.0, 3.0, 4.0)]
        assert_allclose(values, [0.82, -0.28, -2.92, -5.48], atol=1e-12)

    def test_constant_between_kicks(self):
        for t in np.linspace(2.0, 2.999, 7):
            assert comb_truncated_norm(DIMB_STRENGTHS, DIMB_TIMES, t) == pytest.approx(-0.28)

    def test_jump_sizes_match_cumulative_squares(self):
        cums = np.cumsum(DIMB_STRENGTHS)
        for i, tau in enumerate(DIMB_TIMES):
            before = comb_truncated_norm(DIMB_STRENGTHS, DIMB_TIMES, tau - 1e-9)
            after = comb_truncated_norm(DIMB_STRENGTHS, DIMB_TIMES, tau)
            s_prev = cums[i - 1] if i else 0.0
            assert after - before == pytest.approx(-0.5 * (cums[i] ** 2 - s_prev**2))


class TestCombExpansionTerms:
    def test_before_all_kicks_is_trivial(self):
        report = comb_expansion_terms(DIMB_STRENGTHS, DIMB_TIMES, 0.5)
        assert report.order0 == 1.0
        assert report.order1 == 0.0
        assert report.order2_defined == 0.0
        assert report.indefinite == ()

    def test_single_kick_flags_its_own_square(self):
        report = comb_expansion_terms([0.7], [1.0], 2.0)
        assert report.order1 == pytest.approx(-0.7j)
        assert report.order2_defined == 0.0  # no earlier kick to pair with
        assert len(report.indefinite) == 1
        assert report.indefinite[0].coefficient == pytest.approx(-0.49)
        assert report.indefinite[0].time == 1.0

    def test_figure_comb_full_interval(self):
        report = comb_expansion_terms(DIMB_STRENGTHS, DIMB_TIMES, 5.0)
        assert report.order1 == pytest.approx(-3.6j)
        assert len(report.indefinite) == 4

    def test_one_flag_per_kick_inside_interval(self):
        for t, expected in ((0.5, 0), (1.0, 1), (2.5, 2), (4.0, 4), (9.0, 4)):
            report = comb_expansion_terms(DIMB_STRENGTHS, DIMB_TIMES, t)
            assert len(report.indefinite) == expected

    def test_defined_cross_terms_identity(self):
        # sum over ordered pairs equals (S^2 - sum V_i^2)/2
        s = sum(DIMB_STRENGTHS)
        squares = sum(v * v for v in DIMB_STRENGTHS)
        report = comb_expansion_terms(DIMB_STRENGTHS, DIMB_TIMES, 5.0)
        assert report.order2_defined == pytest.approx(-(s * s - squares) / 2)


class TestCombPitaronExpansion:
    def test_trivial_before_kicks(self):
        assert comb_pitaron_expansion(DIMB_STRENGTHS, DIMB_TIMES, 0.5) == (1.0, 0.0)

    def test_figure_comb_values(self):
        re, im = comb_pitaron_expansion(DIMB_STRENGTHS, DIMB_TIMES, 5.0)
        assert re == pytest.approx(-5.48)
        assert im == pytest.approx(-3.6)

    def test_small_kick_matches_exponential_taylor(self):
        re, im = comb_pitaron_expansion([0.1], [1.0], 2.0)
        assert abs(complex(re, im) - np.exp(-0.1j)) < 0.1**3 / 6

    def test_agrees_with_truncated_norm_identity(self):
        # real part is the truncated normalization, imaginary part is -S
        cums = np.cumsum(DIMB_STRENGTHS)
        for t in (0.2, 1.0, 1.7, 2.0, 3.5, 4.0, 6.0):
            re, im = comb_pitaron_expansion(DIMB_STRENGTHS, DIMB_TIMES, t)
            assert re == comb_truncated_norm(DIMB_STRENGTHS, DIMB_TIMES, t)
            s = sum(v for v, tau in zip(DIMB_STRENGTHS, DIMB_TIMES) if tau <= t)
            assert im == -s


class TestSmearedSecondOrder:
    def test_symmetric_gaussian_is_half(self):
        value = smeared_second_order(1e-2, 1e-2, "gaussian", 1.0, 2.0, panels=400)
        assert value == pytest.approx(0.5, abs=0.02)

    def test_symmetric_causal_is_half(self):
        value = smeared_second_order(1e-2, 1e-2, "causal", 1.0, 2.0, panels=400)
        assert value == pytest.approx(0.5, abs=1e-3)

    def test_sharp_inner_saturates_first(self):
        value = smeared_second_order(1e-3, 1e-1, "causal", 1.0, 2.0, panels=2000)
        assert value >= 0.9
        assert value == pytest.approx(0.1 / 0.101, abs=5e-3)

    def test_sharp_outer_arrives_first(self):
        value = smeared_second_order(1e-1, 1e-3, "causal", 1.0, 2.0, panels=2000)
        assert value <= 0.1
        assert value == pytest.approx(0.001 / 0.101, abs=5e-3)

    def test_symmetric_limit_approaches_half(self):
        # truncation error shrinks with the width; quadrature is kept resolved
        deviations = [
            abs(smeared_second_order(eps, eps, "causal", 1.0, 2.0, panels=p) - 0.5)
            for eps, p in ((1e-1, 400), (1e-2, 800), (1e-3, 4000))
        ]
        assert deviations[0] < 1e-4
        assert max(deviations[1:]) < 2e-5

    def test_gaussian_limit_approaches_half(self):
        deviations = [
            abs(smeared_second_order(eps, eps, "gaussian", 1.0, 2.0, panels=p) - 0.5)
            for eps, p in ((1e-1, 200), (1e-2, 400))
        ]
        assert deviations[0] < 0.03
        assert deviations[1] < 1e-6

    def test_rejects_unresolved_widths(self):
        with pytest.raises(ValueError, match="panel"):
            smeared_second_order(1e-4, 1e-4, "gaussian", 1.0, 2.0, panels=16)

    def test_rejects_center_outside_interval(self):
        with pytest.raises(ValueError, match="t1"):
            smeared_second_order(1e-2, 1e-2, "gaussian", 3.0, 2.0)


class TestDominatedConvergence:
    def test_family1_integral_exactly_one(self):
        report = dominated_convergence_demos([1, 10, 100])
        assert report.family1_integrals == (1.0, 1.0, 1.0)

    def test_family2_integral_half(self):
        report = dominated_convergence_demos([5, 50])
        for value in report.family2_integrals:
            assert value == pytest.approx(0.5, abs=1e-8)

    def test_pointwise_values_vanish(self):
        report = dominated_convergence_demos([2, 5, 10, 50])
        vals = report.family2_at_1
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-12

    def test_window_too_small_rejected(self):
        with pytest.raises(ValueError, match="window"):
            dominated_convergence_demos([5], window=0.5)

    def test_rejects_bad_index(self):
        with pytest.raises(ValueError, match="at least 1"):
            dominated_convergence_demos([0])
