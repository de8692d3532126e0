"""Target functions: Tribes, biased Tribes parameters and random monotone trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analysis import ProductDistribution, is_monotone
from .cube import BooleanFunction, DecisionTree, HypothesisClass, Leaf, Split, cube
from .errors import ConfigError, GenerationFailed, InfeasibleParameters, OutOfRange

# ---------------------------------------------------------------------------
# Tribes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TribesSpec:
    """Read-once DNF of ``s`` disjoint AND terms of width ``w``.

    Term ``j`` reads coordinates ``j*w .. j*w + w - 1``.
    """

    w: int
    s: int

    def __post_init__(self):
        if self.w < 1 or self.s < 1:
            raise OutOfRange("Tribes needs w, s >= 1")

    @property
    def k(self) -> int:
        return self.w * self.s

    def prob_false(self) -> Fraction:
        """Pr[Tribes = -1] under the uniform distribution."""
        return (1 - Fraction(1, 2**self.w)) ** self.s

    def correlation(self) -> Fraction:
        """E[x_i * Tribes(x)] with both factors signed; the same for every i."""
        return 2 * self.indicator_correlation()

    def indicator_correlation(self) -> Fraction:
        """E[x_i * 1[Tribes(x) = +1]] = Pr[Tribes = -1] / (2^w - 1)."""
        return self.prob_false() / (2**self.w - 1)

    def function(self, dim: int | None = None) -> BooleanFunction:
        return tribes(self.w, self.s, dim)


def tribes(w: int, s: int, dim: int | None = None) -> BooleanFunction:
    if w < 1 or s < 1:
        raise OutOfRange("Tribes needs w, s >= 1")
    k = w * s
    if k > 24:
        raise OutOfRange(f"Tribes over w*s = {k} > 24 variables")
    dim = k if dim is None else dim
    if dim < k:
        raise OutOfRange(f"dim {dim} < w*s = {k}")
    term = (1 << w) - 1

    def fn(pts):
        out = np.zeros(pts.shape, dtype=bool)
        for j in range(s):
            out |= ((pts >> (j * w)) & term) == term
        return out

    return BooleanFunction(dim, fn, f"tribes_{w},{s}")


def _as_fraction(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def _largest_s(w: int, eps: Fraction, limit: int) -> int | None:
    """Largest s with (1 - 2^-w)^s >= eps, or None if it exceeds ``limit``."""
    base = 1 - Fraction(1, 2**w)
    s, val = 0, Fraction(1)
    while val * base >= eps:
        s += 1
        val *= base
        if s > limit:
            return None
    return s


def tribes_params_for(eps, d: int) -> tuple[int, int, int]:
    """(w*, s*, k): s_w is the largest s with (1 - 2^-w)^s >= eps and w* the largest w with w s_w <= d."""
    e = _as_fraction(eps)
    if not 0 < e <= Fraction(1, 3):
        raise InfeasibleParameters(f"eps must lie in (0, 1/3], got {eps}")
    best = None
    w = 1
    while True:
        s = _largest_s(w, e, d // w)
        if s is None or w * s > d:
            break
        if s >= 1:
            best = (w, s)
        w += 1
    if best is None:
        raise InfeasibleParameters(f"no Tribes parameters with bias >= {eps} fit in d = {d}")
    w, s = best
    return w, s, w * s


# ---------------------------------------------------------------------------
# simple targets and explicit tree representations
# ---------------------------------------------------------------------------


def projection_target(i: int, dim: int) -> BooleanFunction:
    if not 0 <= i < dim:
        raise OutOfRange(f"coordinate {i} outside [0, {dim})")
    return BooleanFunction(dim, lambda pts: (pts >> i) & 1 == 1, f"x{i + 1}")


def majority(k: int, dim: int | None = None) -> BooleanFunction:
    """Majority of the first k coordinates (k odd)."""
    if k < 1 or k % 2 == 0:
        raise OutOfRange("majority needs an odd k >= 1")
    dim = k if dim is None else dim

    def fn(pts):
        ones = sum(((pts >> i) & 1) for i in range(k))
        return 2 * ones > k

    return BooleanFunction(dim, fn, f"maj{k}")


def dnf_tree(terms, dim: int) -> DecisionTree:
    """Decision tree for an OR of disjoint monotone AND terms.

    Each term is tested variable by variable; a failing variable falls
    through to the tree for the remaining terms.  The size satisfies
    size(terms) = w_1 * size(rest) + 1 with size(()) = 1.
    """
    def build(j):
        if j == len(terms):
            return Leaf(0)
        node = Leaf(1)
        for v in reversed(terms[j]):
            node = Split(v, build(j + 1), node)
        return node

    return DecisionTree(build(0), HypothesisClass.projections(dim))


def dnf_size(widths) -> int:
    size = 1
    for w in reversed(list(widths)):
        size = w * size + 1
    return size


def read_once_monotone_dnf(terms, dim: int) -> BooleanFunction:
    flat = [v for t in terms for v in t]
    if len(set(flat)) != len(flat):
        raise OutOfRange("terms must use disjoint coordinates")
    if any(not 0 <= v < dim for v in flat):
        raise OutOfRange("term coordinate outside the cube")
    masks = [sum(1 << v for v in t) for t in terms]

    def fn(pts):
        out = np.zeros(pts.shape, dtype=bool)
        for m in masks:
            out |= (pts & m) == m
        return out

    return BooleanFunction(dim, fn, "dnf[" + ";".join(",".join(f"x{v + 1}" for v in t) for t in terms) + "]")


# ---------------------------------------------------------------------------
# random monotone targets
# ---------------------------------------------------------------------------

GENERATORS = ("read-once-dnf", "rejection-sampled-tree")


def _random_dnf_terms(d: int, s: int, rng) -> list[list[int]]:
    # grow from the last term backwards so the tree size lands exactly on s
    widths, size = [], 1
    while size < s:
        w = int(rng.integers(1, (s - 1) // size + 1))
        widths.insert(0, w)
        size = w * size + 1
    if sum(widths) > d:
        raise GenerationFailed(f"terms need {sum(widths)} > d = {d} coordinates")
    coords = rng.permutation(d)[: sum(widths)].tolist()
    terms, pos = [], 0
    for w in widths:
        terms.append(sorted(coords[pos: pos + w]))
        pos += w
    return terms


def _random_shape(d: int, s: int, rng):
    """Random tree with s leaves and distinct coordinates on every path; leaves are placeholders."""
    root = Leaf(-1)
    leaves = [(root, None, None, ())]  # (leaf, parent, side, coords on path)
    for _ in range(s - 1):
        open_idx = [i for i, lf in enumerate(leaves) if len(lf[3]) < d]
        if not open_idx:
            return None
        leaf, parent, side, used = leaves.pop(open_idx[int(rng.integers(len(open_idx)))])
        free = [c for c in range(d) if c not in used]
        c = int(free[rng.integers(len(free))])
        node = Split(c, Leaf(-1), Leaf(-1))
        if parent is None:
            root = node
        else:
            setattr(parent, side, node)
        leaves.append((node.low, node, "low", used + (c,)))
        leaves.append((node.high, node, "high", used + (c,)))
    return root, [lf[0] for lf in leaves]


def _has_twin_leaves(node) -> bool:
    if isinstance(node, Leaf):
        return False
    if isinstance(node.low, Leaf) and isinstance(node.high, Leaf) and node.low.label == node.high.label:
        return True
    return _has_twin_leaves(node.low) or _has_twin_leaves(node.high)


def _rejection_tree(d: int, s: int, rng, budget: int, labelings: int):
    hyps = HypothesisClass.projections(d)
    if s == 1:
        raise GenerationFailed("a single-leaf tree is constant")
    for _ in range(budget):
        shaped = _random_shape(d, s, rng)
        if shaped is None:
            continue
        root, leaves = shaped
        if s <= 12:
            codes = rng.permutation(1 << s)[:labelings]
        else:
            codes = rng.integers(0, 1 << s, size=labelings)
        for code in codes.tolist():
            for j, lf in enumerate(leaves):
                lf.label = (code >> j) & 1
            if code in (0, (1 << s) - 1) or _has_twin_leaves(root):
                continue
            tree = DecisionTree(root, hyps)
            f = BooleanFunction.from_truth_table(tree.evaluate(cube(d)), "tree")
            if is_monotone(f):
                return f, DecisionTree(_copy(root), hyps)
    raise GenerationFailed(f"no monotone size-{s} tree found in {budget} shapes")


def _copy(node):
    if isinstance(node, Leaf):
        return Leaf(node.label)
    return Split(node.hyp, _copy(node.low), _copy(node.high))


def random_monotone_target(d: int, s: int, seed: int = 0, generator: str = "rejection-sampled-tree",
                           budget: int = 2000, labelings: int = 256) -> tuple[BooleanFunction, DecisionTree]:
    """A monotone function with an explicit decision tree of at most ``s`` leaves."""
    if generator not in GENERATORS:
        raise OutOfRange(f"generator must be one of {GENERATORS}, got {generator!r}")
    if s < 2:
        raise OutOfRange("need s >= 2 for a non-constant target")
    if d < 1 or d > 24:
        raise OutOfRange("d must lie in [1, 24]")
    rng = np.random.default_rng(seed)
    if generator == "read-once-dnf":
        terms = _random_dnf_terms(d, s, rng)
        f = read_once_monotone_dnf(terms, d)
        tree = dnf_tree(terms, d)
    else:
        f, tree = _rejection_tree(d, s, rng, budget, labelings)
    if d <= 16 and not is_monotone(f):
        raise GenerationFailed("generated target is not monotone")
    f.name = f"monotone[{generator},d={d},s={s},seed={seed}]"
    return f, tree


def product_distribution(p) -> ProductDistribution:
    return ProductDistribution(p)


def uniform(d: int) -> ProductDistribution:
    return ProductDistribution.uniform(d)


# ---------------------------------------------------------------------------
# config-level target description
# ---------------------------------------------------------------------------

TARGET_KINDS = ("tribes", "projection", "majority", "random-monotone-dt", "read-once-dnf")


@dataclass
class TargetSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ConfigError(f"unknown target kind {self.kind!r}; expected one of {TARGET_KINDS}")

    def build(self, dim: int) -> tuple[BooleanFunction, DecisionTree | None]:
        """The target function and, when one is known, an explicit tree for it."""
        p = self.params
        if self.kind == "tribes":
            w, s = int(p.get("w", 2)), int(p.get("s", 2))
            return tribes(w, s, dim), None
        if self.kind == "projection":
            i = int(p.get("index", 0))
            f = projection_target(i, dim)
            return f, DecisionTree(Split(i, Leaf(0), Leaf(1)), HypothesisClass.projections(dim))
        if self.kind == "majority":
            return majority(int(p.get("k", 3)), dim), None
        if self.kind == "read-once-dnf":
            terms = [[int(v) - 1 for v in t.split(",")] for t in str(p["terms"]).split(";")]
            return read_once_monotone_dnf(terms, dim), dnf_tree(terms, dim)
        return random_monotone_target(dim, int(p.get("size", 8)), self.seed,
                                      str(p.get("generator", "rejection-sampled-tree")))

    def to_config(self) -> dict[str, str]:
        out = {"target": self.kind, "target_seed": str(self.seed)}
        for k, v in sorted(self.params.items()):
            out[f"target_{k}"] = str(v)
        return out

    @classmethod
    def from_config(cls, cfg: dict) -> "TargetSpec":
        params = {k[len("target_"):]: v for k, v in cfg.items() if k.startswith("target_") and k != "target_seed"}
        return cls(cfg["target"], params, int(cfg.get("target_seed", 0)))
