"""Seeded random instances shared by the lemma suites and the tests."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .analysis import ProductDistribution, is_monotone
from .cube import BooleanFunction, DecisionTree, HypothesisClass, LabeledDistribution, Leaf, Split, cube


def random_explicit(d: int, rng, sparsity: float = 0.0, label_kind: str = "mixed") -> LabeledDistribution:
    """Random explicit distribution on {-1,+1}^d.

    ``sparsity`` is the chance a point gets zero mass.  Labels are
    deterministic, fractional, or a mix of both.
    """
    size = 1 << d
    mass = rng.exponential(size=size)
    if sparsity > 0:
        mass[rng.random(size) < sparsity] = 0.0
        if mass.sum() == 0:
            mass[rng.integers(size)] = 1.0
    mass /= mass.sum()
    if label_kind == "deterministic":
        rate = (rng.random(size) < 0.5).astype(np.float64)
    elif label_kind == "fractional":
        rate = rng.random(size)
    else:
        rate = np.where(rng.random(size) < 0.5, (rng.random(size) < 0.5).astype(np.float64), rng.random(size))
    keep = np.flatnonzero(mass > 0)
    return LabeledDistribution(d, keep, mass[keep] / mass[keep].sum(), rate[keep], LabeledDistribution.EXPLICIT)


def random_view(dist: LabeledDistribution, rng, max_literals: int = 3):
    """A random nondegenerate restriction view of ``dist`` over coordinate projections."""
    hyps = HypothesisClass.projections(dist.dim)
    for _ in range(100):
        k = int(rng.integers(0, min(max_literals, dist.dim - 1) + 1))
        coords = rng.choice(dist.dim, size=k, replace=False)
        path = tuple((hyps[int(c)], int(rng.integers(2))) for c in coords)
        view = dist.view(path)
        if not view.degenerate:
            return view, [int(c) for c in coords]
    return dist.view(), []


def random_split_instance(rng, dmax: int = 8):
    """(view, hypothesis) with the split coordinate free in the view."""
    d = int(rng.integers(2, dmax + 1))
    dist = random_explicit(d, rng, sparsity=float(rng.choice([0.0, 0.3])))
    view, used = random_view(dist, rng)
    free = [i for i in range(d) if i not in used]
    h = HypothesisClass.projections(d)[int(rng.choice(free))]
    return view, h


def random_pair(d: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Two random probability vectors over the 2^(d+1) joint (x, y) cells."""
    size = 1 << (d + 1)
    p1 = rng.exponential(size=size)
    mode = rng.integers(3)
    if mode == 0:
        p2 = rng.exponential(size=size)
    elif mode == 1:  # mixture with a random component
        eta = rng.random()
        p2 = (1 - eta) * p1 / p1.sum() + eta * rng.dirichlet(np.ones(size))
    else:  # sparse supports
        p1[rng.random(size) < 0.5] = 0
        p2 = rng.exponential(size=size)
        p2[rng.random(size) < 0.5] = 0
        p1[0] += 1e-3
        p2[-1] += 1e-3
    return p1 / p1.sum(), p2 / p2.sum()


def random_fraction_joint(leaves: int, xs: int, rng, denom: int = 64) -> dict:
    """Random joint over (leaf, x) with exact rational masses."""
    weights = rng.integers(0, denom, size=(leaves, xs))
    if weights.sum() == 0:
        weights[0, 0] = 1
    total = int(weights.sum())
    return {(l, x): Fraction(int(weights[l, x]), total)
            for l in range(leaves) for x in range(xs) if weights[l, x]}


def random_monotone_function(d: int, rng, max_generators: int = 4) -> BooleanFunction:
    """Upward closure of a few random points (plus the constant functions now and then)."""
    pts = cube(d)
    roll = rng.random()
    if roll < 0.05:
        return BooleanFunction.from_truth_table(np.zeros(len(pts), bool), "zero")
    if roll < 0.1:
        return BooleanFunction.from_truth_table(np.ones(len(pts), bool), "one")
    gens = rng.integers(0, len(pts), size=int(rng.integers(1, max_generators + 1)))
    table = np.zeros(len(pts), dtype=bool)
    for g in gens.tolist():
        table |= (pts & g) == g
    f = BooleanFunction.from_truth_table(table, "upset")
    assert is_monotone(f)
    return f


def random_product(d: int, rng) -> ProductDistribution:
    p = rng.random(d)
    if rng.random() < 0.2:
        p[rng.integers(d)] = float(rng.choice([0.0, 1.0]))
    return ProductDistribution(p)


def random_tree(d: int, max_leaves: int, rng) -> DecisionTree:
    """Random coordinate tree with at most ``max_leaves`` leaves and random labels."""
    target = int(rng.integers(1, max_leaves + 1))
    root = Leaf(int(rng.integers(2)))
    open_leaves = [(root, None, None, ())]
    while len(open_leaves) < target:
        cand = [i for i, lf in enumerate(open_leaves) if len(lf[3]) < d]
        if not cand:
            break
        leaf, parent, side, used = open_leaves.pop(cand[int(rng.integers(len(cand)))])
        free = [c for c in range(d) if c not in used]
        c = free[int(rng.integers(len(free)))]
        node = Split(c, Leaf(int(rng.integers(2))), Leaf(int(rng.integers(2))))
        if parent is None:
            root = node
        else:
            setattr(parent, side, node)
        open_leaves += [(node.low, node, "low", used + (c,)), (node.high, node, "high", used + (c,))]
    return DecisionTree(root, HypothesisClass.projections(d))
