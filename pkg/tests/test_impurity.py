import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noisytd import impurity as imp
from noisytd.cube import LabeledDistribution, make_explicit, projection
from noisytd.errors import ConfigError, OutOfRange
from noisytd.instances import random_split_instance
from noisytd.targets import majority


def two_bit(tau, mu0, mu1):
    """x1 carries the split; mass tau on x1 = +1 with positive rates mu1 / mu0."""
    return make_explicit([("1", tau, mu1), ("0", 1 - tau, mu0)])


class TestImpurityFunctions:
    def test_gini_values(self):
        G = imp.gini()
        assert G(0.5) == 1.0
        assert G(0.0) == 0.0
        assert G(0.25) == pytest.approx(0.75, abs=1e-15)

    @pytest.mark.parametrize("G", [imp.gini(), imp.entropy(), imp.kmsqrt(), imp.custom_concave(2.0)])
    def test_axioms_and_curvature(self, G):
        imp.validate(G)

    def test_kappa_values(self):
        assert imp.gini().kappa == 8.0
        assert imp.entropy().kappa == pytest.approx(4 / math.log(2))
        assert imp.kmsqrt().kappa == 4.0

    def test_custom_concave_matches_gini_at_eight(self):
        p = np.linspace(0, 1, 101)
        np.testing.assert_allclose(imp.custom_concave(8.0)(p), imp.gini()(p), atol=1e-15)

    def test_ids(self):
        assert imp.from_id("concave:3").id == "concave:3"
        assert imp.from_id("kmsqrt").kind == "kmsqrt"
        with pytest.raises(ConfigError):
            imp.from_id("misclassification")
        with pytest.raises(OutOfRange):
            imp.custom_concave(9.0)

    def test_too_flat_fails_validation(self):
        flat = imp.ImpurityFn("gini", 8.0, imp.kmsqrt().fn)
        with pytest.raises(ValueError):
            imp.validate(flat)


class TestPurityGain:
    def test_independent_split_gains_nothing(self):
        D = two_bit(0.3, 0.4, 0.4)
        for G in (imp.gini(), imp.entropy(), imp.kmsqrt()):
            assert imp.purity_gain(D, projection(0, 1), G).delta == pytest.approx(0.0, abs=1e-15)

    def test_perfect_split(self):
        r = imp.purity_gain(two_bit(0.5, 0.0, 1.0), projection(0, 1), imp.gini())
        assert r.delta == pytest.approx(1.0, abs=1e-15)

    def test_three_sixteenths(self):
        # mu = 3/8, G(3/8) = 15/16, children 3/4 * G(1/2) = 12/16
        r = imp.purity_gain(two_bit(0.25, 0.5, 0.0), projection(0, 1), imp.gini())
        assert r.delta == pytest.approx(3 / 16, abs=1e-15)

    def test_weighted_gain_agrees(self):
        G = imp.gini()
        D = two_bit(0.25, 0.5, 0.0)
        r = imp.purity_gain(D, projection(0, 1), G)
        W, P, W1, P1 = 1.0, 0.375, 0.25, 0.0
        assert float(imp.weighted_gain(G, W, P, W1, P1)) == pytest.approx(r.weighted_delta, abs=1e-15)

    def test_empty_branch(self):
        D = make_explicit([("1", 1.0, 0.3)])
        assert imp.purity_gain(D, projection(0, 1), imp.gini()).delta == 0.0

    def test_maj3_root_split_is_tight(self):
        D = LabeledDistribution.from_function(majority(3, 3))
        h = projection(0, 3)
        chk = imp.covariance_drop_bound_check(D.view(), h, imp.gini())
        assert chk.covariance == pytest.approx(1 / 8, abs=1e-15)
        assert chk.delta == pytest.approx(1 / 4, abs=1e-15)
        assert chk.bound == pytest.approx(1 / 4, abs=1e-15)


class TestIdentityAndBound:
    def test_identity_examples(self):
        assert imp.gini_gain_identity_check(two_bit(0.5, 0.0, 1.0), projection(0, 1)) == pytest.approx((1.0, 1.0))
        delta, closed = imp.gini_gain_identity_check(two_bit(0.3, 0.2, 0.2), projection(0, 1))
        assert delta == pytest.approx(0.0, abs=1e-15)
        assert closed == pytest.approx(0.0, abs=1e-15)

    def test_bound_example(self):
        chk = imp.covariance_drop_bound_check(two_bit(0.5, 0.0, 1.0), projection(0, 1), imp.gini())
        assert chk.covariance == pytest.approx(0.25)
        assert chk.bound == pytest.approx(1.0)
        assert chk.passed

    def test_random_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            view, h = random_split_instance(rng)
            delta, closed = imp.gini_gain_identity_check(view, h)
            assert abs(delta - closed) <= 1e-12

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 0.99), st.floats(0, 1), st.floats(0, 1),
           st.sampled_from(["gini", "entropy", "kmsqrt", "concave:5"]))
    def test_bound_property(self, tau, mu0, mu1, name):
        chk = imp.covariance_drop_bound_check(two_bit(tau, mu0, mu1), projection(0, 1), imp.from_id(name))
        assert chk.passed
        assert chk.delta >= -1e-15
