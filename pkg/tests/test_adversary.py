from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from noisytd import impurity as imp
from noisytd.adversary import (
    build_lowerbound_instance,
    corrupt_labels_agnostic,
    corrupt_sample_nasty,
    draw_sample,
    largest_gamma,
    shift_mixture,
    strongest_hypothesis,
)
from noisytd.analysis import tv_distance
from noisytd.cube import BooleanFunction, LabeledDistribution
from noisytd.errors import InfeasibleParameters, OutOfRange
from noisytd.instances import random_explicit


def dictator_sample(n=1000, d=4, seed=0):
    D = LabeledDistribution.from_function(BooleanFunction(d, lambda p: p & 1 == 1))
    return draw_sample(D, n, np.random.default_rng(seed))


def signed_corr(sample, j=0):
    x = 2.0 * ((sample.points >> j) & 1) - 1.0
    y = 2.0 * sample.rate - 1.0
    return float(np.dot(sample.mass, x * y))


def expand(sample):
    """Multiset of (point, label) records."""
    out = []
    for p, c, k in zip(sample.points, sample.counts, sample.positives):
        out += [(int(p), 1)] * int(k) + [(int(p), 0)] * int(c - k)
    return sorted(out)


class TestSampling:
    def test_counts(self):
        S = dictator_sample(500)
        assert S.n == 500
        assert S.counts.sum() == 500
        np.testing.assert_array_equal(S.positives, np.where(S.points & 1, S.counts, 0))

    def test_seeded(self):
        a, b = dictator_sample(seed=3), dictator_sample(seed=3)
        np.testing.assert_array_equal(a.counts, b.counts)


class TestNasty:
    def test_zero_budget_is_identity(self):
        S = dictator_sample()
        out, plan = corrupt_sample_nasty(S, 0.0)
        assert plan.edit_count == 0
        assert expand(out) == expand(S)
        assert plan.to_csv().strip() == "index,before_point,before_label,after_point,after_label"

    def test_budget_floor(self):
        S = dictator_sample(1000)
        out, plan = corrupt_sample_nasty(S, 1 / 1000, "random-replace", seed=1)
        assert plan.edit_count == 1
        assert plan.changed_count() <= 1
        out, plan = corrupt_sample_nasty(S, 0.0999, "random-replace", seed=1)
        assert plan.edit_count == 99

    @pytest.mark.parametrize("strategy", ["random-replace", "flip-agreeing-labels", "correlation-cancel"])
    def test_edits_stay_in_budget(self, strategy):
        S = dictator_sample(2000)
        out, plan = corrupt_sample_nasty(S, 0.05, strategy, seed=2)
        assert out.n == S.n
        assert plan.edit_count <= 100
        # the multiset difference is exactly the edited records
        before, after = expand(S), expand(out)
        removed = sum((Counter(before) - Counter(after)).values())
        assert removed <= plan.edit_count
        assert tv_distance(S.joint(), out.joint()) <= 0.05 + 1e-12

    def test_flip_agreeing_lowers_correlation_by_twice_flipped(self):
        S = dictator_sample(1000)
        out, plan = corrupt_sample_nasty(S, 0.03, "flip-agreeing-labels", seed=5)
        assert plan.edit_count == 30
        assert signed_corr(S) - signed_corr(out) == pytest.approx(2 * 30 / 1000, abs=1e-12)

    def test_plan_rows_replay(self):
        S = dictator_sample(300)
        out, plan = corrupt_sample_nasty(S, 0.1, "random-replace", seed=7)
        records = []
        for p, c, k in zip(S.points, S.counts, S.positives):
            records += [(int(p), 0)] * int(c - k) + [(int(p), 1)] * int(k)
        for idx, bp, bl, ap, al in plan.rows():
            assert records[idx] == (int(bp[::-1], 2), bl)
            records[idx] = (int(ap[::-1], 2), al)
        assert sorted(records) == expand(out)

    def test_correlation_cancel_shape(self):
        S = dictator_sample(400, d=5)
        _, plan = corrupt_sample_nasty(S, 0.25, "correlation-cancel", seed=1, k=2)
        head = plan.after_points & 3
        np.testing.assert_array_equal(head, np.where(plan.after_labels == 1, 0, 3))

    def test_unknown_strategy(self):
        with pytest.raises(OutOfRange):
            corrupt_sample_nasty(dictator_sample(), 0.1, "swap")


class TestAgnostic:
    def test_points_never_move(self):
        S = dictator_sample(800)
        out, plan = corrupt_labels_agnostic(S, 0.1, seed=3)
        np.testing.assert_array_equal(plan.after_points, plan._before()[0])
        np.testing.assert_array_equal(out.counts, np.bincount(np.searchsorted(out.points, S.points),
                                                              weights=S.counts).astype(int))
        assert plan.changed_count() == plan.edit_count == 80

    def test_agreeing_flips(self):
        S = dictator_sample(800)
        out, plan = corrupt_labels_agnostic(S, 0.05, "flip-agreeing-labels", seed=3)
        assert signed_corr(S) - signed_corr(out) == pytest.approx(2 * 40 / 800, abs=1e-12)

    def test_strongest_hypothesis(self):
        j, cov = strongest_hypothesis(dictator_sample())
        assert j == 0 and cov > 0


class TestShift:
    def test_zero_weight(self):
        rng = np.random.default_rng(0)
        D, E = random_explicit(3, rng), random_explicit(3, rng)
        assert tv_distance(shift_mixture(D, E, 0.0), D) == 0.0

    def test_same_component(self):
        D = random_explicit(3, np.random.default_rng(1))
        assert tv_distance(shift_mixture(D, D, 0.4), D) == pytest.approx(0.0, abs=1e-15)

    def test_disjoint_supports(self):
        D = LabeledDistribution.from_arrays(2, [0, 1], [0.5, 0.5], [1.0, 0.0])
        E = LabeledDistribution.from_arrays(2, [2, 3], [0.5, 0.5], [1.0, 1.0])
        assert tv_distance(D, shift_mixture(D, E, 0.25)) == pytest.approx(0.25, abs=1e-15)


class TestLowerBound:
    def test_largest_gamma(self):
        g = largest_gamma(0.1)
        assert g ** (1 / g) <= 0.1
        assert (g + 1e-6) ** (1 / (g + 1e-6)) > 0.1
        assert g == pytest.approx(0.399, abs=1e-3)

    def test_small_instance(self):
        inst = build_lowerbound_instance(3, 0.1, gamma=0.35, bias_factor=1.0)
        assert (inst.w, inst.s, inst.k) == (1, 3, 3)
        assert inst.v == Fraction(1, 4)
        assert inst.eta_exact == Fraction(1, 5)

    def test_default_instance(self):
        inst = build_lowerbound_instance(12, 0.1)
        assert (inst.ell, inst.w, inst.s, inst.k) == (4, 1, 2, 2)
        assert inst.v == Fraction(1, 2)
        assert inst.eta_exact == Fraction(1, 3)
        assert inst.label_bias() == pytest.approx(0.25)
        assert abs(inst.cancellation_residual()) <= 1e-14
        np.testing.assert_allclose(inst.covariances(), 0.0, atol=1e-12)
        view = inst.corrupted.view()
        for G in (imp.gini(), imp.entropy(), imp.kmsqrt()):
            for h in inst.hypotheses:
                assert abs(imp.purity_gain(view, h, G).delta) <= 1e-12

    def test_mixture_is_eta_close(self):
        inst = build_lowerbound_instance(8, 0.1)
        assert tv_distance(inst.clean, inst.corrupted) <= inst.eta + 1e-12

    def test_clean_coordinates_are_correlated(self):
        inst = build_lowerbound_instance(8, 0.1)
        cov = inst.covariances(inst.clean)
        assert np.all(cov[: inst.k] > 0)
        np.testing.assert_allclose(cov[inst.k:], 0.0, atol=1e-15)

    def test_infeasible(self):
        with pytest.raises(InfeasibleParameters):
            build_lowerbound_instance(12, 0.1, gamma=0.6)
        with pytest.raises(InfeasibleParameters):
            build_lowerbound_instance(12, 0.4)
