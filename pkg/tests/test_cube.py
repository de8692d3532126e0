import itertools

import numpy as np
import pytest

from noisytd.cube import (
    BitPoint,
    BooleanFunction,
    DecisionTree,
    HypothesisClass,
    LabeledDistribution,
    Leaf,
    Restriction,
    Split,
    apply_restriction,
    bit_matrix,
    condition,
    cube,
    format_bits,
    make_explicit,
    moments,
    parse_bits,
    projection,
    tree_size_and_depth,
)
from noisytd.errors import DimMismatch, DuplicatePoint, NonNormalized, OutOfRange, ZeroWeight
from noisytd.targets import majority, tribes


def maj3():
    return majority(3, 3)


class TestPoints:
    def test_bit_layout(self):
        p = BitPoint.from_signed((1, -1, 1))
        assert p.bits == 0b101
        assert p[0] == 1 and p[1] == -1
        assert p.signed() == (1, -1, 1)
        assert p.bitstring() == "101"
        assert BitPoint.parse("101") == p

    def test_rejects_bad_points(self):
        with pytest.raises(DimMismatch):
            BitPoint(8, 3)
        with pytest.raises(OutOfRange):
            BitPoint.from_signed((1, 0))

    def test_format_roundtrip(self):
        for bits in range(32):
            assert parse_bits(format_bits(bits, 5)) == bits

    def test_bit_matrix_rows_are_coordinates(self):
        pts = cube(3)
        m = bit_matrix(pts, 3)
        assert m.shape == (3, 8)
        np.testing.assert_array_equal(m[1], [(x >> 1) & 1 for x in range(8)])


class TestDistributions:
    def test_point_mass(self):
        D = make_explicit([("101", 1.0, 1.0)])
        w, mu, var = moments(D)
        assert (w, mu, var) == (1.0, 1.0, 0.0)

    def test_projection_label_is_balanced(self):
        D = LabeledDistribution.from_function(BooleanFunction(2, lambda p: p & 1 == 1))
        assert D.mu == pytest.approx(0.5, abs=1e-15)

    def test_maj3_mean(self):
        D = LabeledDistribution.from_function(maj3())
        assert D.mu == pytest.approx(0.5, abs=1e-15)

    def test_rejects_unnormalized(self):
        with pytest.raises(NonNormalized):
            LabeledDistribution.from_arrays(2, [0, 1], [0.5, 0.4], [0, 1])

    def test_rejects_duplicates(self):
        with pytest.raises(DuplicatePoint):
            LabeledDistribution.from_arrays(2, [1, 1], [0.5, 0.5], [0, 1])

    def test_empirical_counts(self):
        S = LabeledDistribution.empirical([3, 3, 1, 3], [1, 0, 1, 1], 2)
        assert S.n == 4
        np.testing.assert_array_equal(S.points, [1, 3])
        np.testing.assert_allclose(S.mass, [0.25, 0.75])
        np.testing.assert_allclose(S.rate, [1.0, 2 / 3])

    def test_text_roundtrip(self):
        rng = np.random.default_rng(0)
        mass = rng.random(16)
        mass /= mass.sum()
        D = LabeledDistribution.from_arrays(4, np.arange(16), mass, rng.random(16))
        back = LabeledDistribution.from_text(D.to_text())
        np.testing.assert_array_equal(back.points, D.points)
        np.testing.assert_array_equal(back.mass, D.mass)
        np.testing.assert_array_equal(back.rate, D.rate)


class TestConditioning:
    def test_empty_path_is_identity(self):
        D = LabeledDistribution.from_function(maj3())
        v = D.view()
        assert v.weight == 1.0
        assert v.moments().mu == D.mu

    def test_weight_of_half_cube(self):
        D = LabeledDistribution.from_function(BooleanFunction(2, lambda p: p & 1 == 1))
        assert condition(D, [(projection(0, 2), 1)]).weight == pytest.approx(0.5)

    def test_satisfied_term(self):
        D = LabeledDistribution.from_function(tribes(1, 2))
        v = condition(D, [(projection(0, 2), 1)])
        assert v.moments().mu == 1.0

    def test_maj3_view(self):
        D = LabeledDistribution.from_function(maj3())
        w, mu, var = moments(condition(D, [(projection(0, 3), 1)]))
        assert mu == pytest.approx(3 / 4, abs=1e-15)
        assert var == pytest.approx(3 / 16, abs=1e-15)

    def test_zero_weight_view(self):
        D = make_explicit([("00", 1.0, 0.0)])
        v = condition(D, [(projection(0, 2), 1)])
        assert v.degenerate
        with pytest.raises(ZeroWeight):
            v.moments()

    def test_view_dim_mismatch(self):
        D = LabeledDistribution.from_function(maj3())
        with pytest.raises(DimMismatch):
            D.view([(projection(0, 2), 1)])


class TestTrees:
    H2 = HypothesisClass.projections(2)

    def test_single_leaf(self):
        T = DecisionTree.leaf(1, self.H2)
        assert T.evaluate(cube(2)).all()
        assert tree_size_and_depth(T) == (1, 0, 0.0)

    def test_root_split_is_projection(self):
        T = DecisionTree(Split(0, Leaf(0), Leaf(1)), self.H2)
        np.testing.assert_array_equal(T.evaluate(cube(2)), (cube(2) & 1) == 1)
        assert T(BitPoint.from_signed((1, -1))) == 1

    def test_complete_depth_two(self):
        T = DecisionTree(Split(0, Split(1, Leaf(0), Leaf(1)), Split(1, Leaf(1), Leaf(0))), self.H2)
        size, depth, expected = tree_size_and_depth(T)
        assert (size, depth) == (4, 2)
        assert expected == pytest.approx(2.0)

    def test_path_tree_expected_depth(self):
        H = HypothesisClass.projections(3)
        T = DecisionTree(Split(0, Leaf(0), Split(1, Leaf(0), Split(2, Leaf(0), Leaf(1)))), H)
        size, depth, expected = tree_size_and_depth(T)
        assert (size, depth) == (4, 3)
        assert expected == pytest.approx(7 / 4, abs=1e-15)

    def test_tribes_tree_matches_formula(self):
        from noisytd.targets import dnf_tree

        f = tribes(2, 2)
        T = dnf_tree([[0, 1], [2, 3]], 4)
        np.testing.assert_array_equal(T.evaluate(cube(4)), f.truth_table)

    def test_text_roundtrip(self):
        T = DecisionTree(Split(1, Leaf(0), Split(0, Leaf(1), Leaf(0))), self.H2)
        back = DecisionTree.from_text(T.to_text())
        np.testing.assert_array_equal(back.evaluate(cube(2)), T.evaluate(cube(2)))
        assert back.to_text() == T.to_text()


class TestRestrictions:
    def test_all_free_is_identity(self):
        f = maj3()
        g = apply_restriction(f, Restriction.free(3))
        np.testing.assert_array_equal(g.truth_table, f.truth_table)

    def test_fixed_projection_is_constant(self):
        f = BooleanFunction(2, lambda p: p & 1 == 1)
        g = apply_restriction(f, Restriction.parse("+*"))
        assert g.truth_table.all()

    def test_maj3_fixing_third_gives_or(self):
        g = apply_restriction(maj3(), Restriction.parse("**+"))
        expected = [any(bits) for bits in ((x & 1, x >> 1 & 1) for x in range(4))]
        np.testing.assert_array_equal(g.truth_table, expected)

    def test_consistent_points(self):
        rho = Restriction.parse("+*-*")
        pts = rho.consistent_points()
        assert len(pts) == 4
        assert rho.consistent(pts).all()
        assert rho.consistent(cube(4)).sum() == 4
        assert str(rho) == "+*-*"

    def test_restriction_enumeration_count(self):
        rhos = [Restriction(v) for v in itertools.product((-1, 1, None), repeat=3)]
        assert sum(r.specified_count == 0 for r in rhos) == 1
        assert len(rhos) == 27
