import math

import numpy as np
import pytest

from noisytd import impurity as imp
from noisytd.adversary import build_lowerbound_instance
from noisytd.analysis import weak_learning_advantage
from noisytd.cube import BooleanFunction, DecisionTree, HypothesisClass, LabeledDistribution, Leaf, cube, make_explicit
from noisytd.errors import OutOfRange
from noisytd.instances import random_explicit
from noisytd.targets import majority, random_monotone_target
from noisytd.topdown import (
    TrainConfig,
    evaluate_error,
    g_value,
    progress_audit,
    replay,
    sample_size_for,
    train,
    tree_at_size,
)


def proj_target(d=2):
    return LabeledDistribution.from_function(BooleanFunction(d, lambda p: p & 1 == 1))


def brute_best_gain(dist, tree, G):
    """Largest weighted gain over every (leaf, coordinate) pair, by direct enumeration."""
    best = 0.0
    for path, _ in tree.leaves():
        mask = np.ones(len(dist.points), bool)
        for h, b in path:
            mask &= ((dist.points >> h) & 1) == b
        for j in range(dist.dim):
            go = ((dist.points >> j) & 1) == 1
            W, P = dist.mass[mask].sum(), (dist.mass * dist.rate)[mask].sum()
            W1, P1 = dist.mass[mask & go].sum(), (dist.mass * dist.rate)[mask & go].sum()
            best = max(best, float(imp.weighted_gain(G, W, P, W1, P1)))
    return best


class TestTrain:
    def test_one_perfect_split(self):
        D = proj_target()
        tree, trace = train(D, TrainConfig(t=2))
        assert tree.size == 2
        assert tree.root.hyp == 0
        assert evaluate_error(tree, D) == 0.0

    def test_single_leaf_predicts_majority(self):
        D = make_explicit([("00", 0.3, 1.0), ("01", 0.4, 0.5), ("11", 0.3, 0.0)])
        tree, trace = train(D, TrainConfig(t=1))
        assert tree.size == 1
        assert evaluate_error(tree, D) == pytest.approx(min(D.mu, 1 - D.mu))
        assert not trace.steps

    def test_stops_when_pure(self):
        D = proj_target(4)
        tree, _ = train(D, TrainConfig(t=64))
        assert tree.size == 2

    def test_leaf_label_tie_goes_to_zero(self):
        D = make_explicit([("0", 0.5, 0.5), ("1", 0.5, 0.5)])
        tree, _ = train(D, TrainConfig(t=1))
        assert tree.root.label == 0
        # zero-gain splits of impure leaves are still taken
        tree, trace = train(D, TrainConfig(t=4))
        assert tree.size == 2
        assert trace.steps[0].weighted_gain == 0.0
        assert all(leaf.label == 0 for _, leaf in tree.leaves())

    def test_error_monotone_in_g(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            D = random_explicit(5, rng)
            _, trace = train(D, TrainConfig(t=16))
            g = [trace.g_initial] + [s.g_after for s in trace.steps]
            assert all(b <= a + 1e-12 for a, b in zip(g, g[1:]))
            for s in trace.steps:
                assert s.g_before - s.g_after == pytest.approx(s.weighted_gain, abs=1e-12)

    def test_greedy_choice_matches_brute_force(self):
        rng = np.random.default_rng(11)
        G = imp.gini()
        for _ in range(10):
            D = random_explicit(4, rng)
            _, trace = train(D, TrainConfig(t=8))
            H = HypothesisClass.projections(4)
            for k, step in enumerate(trace.steps):
                prefix = tree_at_size(D, H, trace, k + 1)
                assert step.weighted_gain == pytest.approx(brute_best_gain(D, prefix, G), abs=1e-12)

    def test_g_value_matches_trace(self):
        D = LabeledDistribution.from_function(majority(3, 3))
        G = imp.entropy()
        tree, trace = train(D, TrainConfig(t=8, impurity=G))
        assert g_value(tree, D, G) == pytest.approx(trace.steps[-1].g_after, abs=1e-12)
        assert evaluate_error(tree, D) == 0.0

    def test_monitor_records_clean_error(self):
        rng = np.random.default_rng(2)
        D, C = random_explicit(4, rng), random_explicit(4, rng)
        H = HypothesisClass.projections(4)
        _, trace = train(D, TrainConfig(t=6), monitors=[C])
        for size, err in trace.monitor_by_size(0).items():
            assert err == pytest.approx(evaluate_error(tree_at_size(D, H, trace, size), C), abs=1e-12)

    def test_replay_reproduces_tree(self):
        rng = np.random.default_rng(8)
        D = random_explicit(5, rng)
        tree, trace = train(D, TrainConfig(t=10))
        again = replay(D, HypothesisClass.projections(5), [(s.leaf_id, s.hyp_id) for s in trace.steps])
        assert again.to_text() == tree.to_text()

    def test_bad_config(self):
        with pytest.raises(OutOfRange):
            TrainConfig(t=0)
        with pytest.raises(OutOfRange):
            TrainConfig(t=4, tie_break="middle")


class TestTieBreaking:
    def test_policies_on_symmetric_target(self):
        D = LabeledDistribution.from_function(majority(3, 3))
        lo, _ = train(D, TrainConfig(t=2, tie_break="lowest"))
        hi, _ = train(D, TrainConfig(t=2, tie_break="highest"))
        assert lo.root.hyp == 0
        assert hi.root.hyp == 2

    def test_random_policy_is_seeded(self):
        D = LabeledDistribution.from_function(majority(5, 5))
        roots = {train(D, TrainConfig(t=2, tie_break="random", seed=s))[0].root.hyp for s in range(30)}
        assert len(roots) > 1
        a, _ = train(D, TrainConfig(t=6, tie_break="random", seed=4))
        b, _ = train(D, TrainConfig(t=6, tie_break="random", seed=4))
        assert a.to_text() == b.to_text()

    def test_lower_bound_first_split_is_uninformative(self):
        inst = build_lowerbound_instance(6, 1 / 3, gamma=0.35, bias_factor=1.0)
        tree, trace = train(inst.corrupted, TrainConfig(t=2, tie_break="highest"))
        assert tree.root.hyp >= inst.k
        assert trace.steps[0].weighted_gain == pytest.approx(0.0, abs=1e-12)


class TestErrors:
    def test_constant_trees(self):
        H = HypothesisClass.projections(1)
        D = make_explicit([("0", 0.5, 0.7), ("1", 0.5, 0.7)])
        assert evaluate_error(DecisionTree(Leaf(1), H), D) == pytest.approx(0.3)
        D2 = make_explicit([("0", 0.5, 0.5), ("1", 0.5, 0.5)])
        assert evaluate_error(DecisionTree(Leaf(0), H), D2) == pytest.approx(0.5)

    def test_exact_representation(self):
        f = majority(3, 3)
        D = LabeledDistribution.from_function(f)
        tree, _ = train(D, TrainConfig(t=8))
        np.testing.assert_array_equal(tree.evaluate(cube(3)), f.truth_table)


class TestAudit:
    def test_dictator_first_step(self):
        D = proj_target()
        recs = progress_audit(D, TrainConfig(t=2), gamma=1.0)
        assert len(recs) == 1
        r = recs[0]
        assert r.checked and r.passed
        assert r.bound == pytest.approx(1.0)
        assert r.gain == pytest.approx(1.0)

    def test_pure_distribution_checks_nothing(self):
        D = make_explicit([("0", 0.5, 1.0), ("1", 0.5, 1.0)])
        assert progress_audit(D, TrainConfig(t=4), gamma=1.0) == []

    def test_random_monotone_targets(self):
        for seed in range(5):
            f, _ = random_monotone_target(10, 8, seed)
            D = LabeledDistribution.from_function(f)
            gamma = weak_learning_advantage(D).gamma
            assert gamma > 0
            recs = progress_audit(D, TrainConfig(t=32), gamma)
            assert all(r.passed for r in recs)
            assert any(r.checked for r in recs)


class TestSampleSize:
    def test_formula(self):
        # 8 * 1 * 1 * ln(10) / 0.25 = 73.68...
        assert sample_size_for(0.5, 1, 1, 0.9) == 74

    def test_independent_recompute(self):
        n = sample_size_for(0.01, 64, 16, 0.9)
        expected = math.ceil(8 * 64**2 * 16 * math.log(64 * 16 / 0.1) / 0.01**2)
        assert n == expected

    def test_boost_config_value(self):
        assert sample_size_for(0.45, 256, 14, 0.9) == 380116511

    @pytest.mark.parametrize("args", [(0.0, 1, 1), (0.6, 1, 1), (0.1, 0, 1), (0.1, 1, 0)])
    def test_rejects(self, args):
        with pytest.raises(OutOfRange):
            sample_size_for(*args)
