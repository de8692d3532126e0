"""Boolean-cube domain, labeled distributions, restrictions and decision trees.

Points of {-1,+1}^d are stored as d-bit integer words: bit j carries
coordinate j (0-based) with bit value 1 meaning +1 and 0 meaning -1.
Labels live in {0,1}; the signed view is ``2*y - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    DuplicatePoint,
    EmptyHypothesisClass,
    NonNormalized,
    OutOfRange,
    ZeroWeight,
)

MAX_EXPLICIT_DIM = 24
NORMALIZATION_TOL = 1e-12


# ---------------------------------------------------------------------------
# points and labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BitPoint:
    bits: int
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise OutOfRange(f"dim must be >= 1, got {self.dim}")
        if self.bits < 0 or self.bits >> self.dim:
            raise DimMismatch(f"bits {self.bits:#x} do not fit in dim {self.dim}")

    def __getitem__(self, i: int) -> int:
        """Signed value of coordinate ``i`` (0-based)."""
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return 1 if (self.bits >> i) & 1 else -1

    def signed(self) -> tuple[int, ...]:
        return tuple(self[i] for i in range(self.dim))

    @classmethod
    def from_signed(cls, values: Sequence[int]) -> "BitPoint":
        bits = 0
        for i, v in enumerate(values):
            if v not in (-1, 1):
                raise OutOfRange(f"coordinate {i} must be -1 or +1, got {v}")
            if v == 1:
                bits |= 1 << i
        return cls(bits, len(values))

    def bitstring(self) -> str:
        return format_bits(self.bits, self.dim)

    @classmethod
    def parse(cls, text: str) -> "BitPoint":
        return cls(parse_bits(text), len(text))


def format_bits(bits: int, dim: int) -> str:
    """Bitstring with coordinate 0 first."""
    return "".join("1" if (bits >> i) & 1 else "0" for i in range(dim))


def parse_bits(text: str) -> int:
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {text!r}")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def to_signed(y):
    """{0,1} label(s) -> {-1,+1}."""
    return 2 * np.asarray(y, dtype=np.int64) - 1 if not np.isscalar(y) else 2 * int(y) - 1


def to_unsigned(y):
    """{-1,+1} label(s) -> {0,1}."""
    if np.isscalar(y):
        return (int(y) + 1) // 2
    return (np.asarray(y, dtype=np.int64) + 1) // 2


def cube(dim: int) -> np.ndarray:
    """All 2^dim points in increasing word order."""
    if not 1 <= dim <= MAX_EXPLICIT_DIM:
        raise OutOfRange(f"explicit enumeration supports 1 <= d <= {MAX_EXPLICIT_DIM}")
    return np.arange(1 << dim, dtype=np.int64)


def bit_matrix(points: np.ndarray, dim: int) -> np.ndarray:
    """(dim, n) boolean matrix; row j is coordinate j equal to +1."""
    points = np.asarray(points, dtype=np.int64)
    shifts = np.arange(dim, dtype=np.int64)[:, None]
    return ((points[None, :] >> shifts) & 1).astype(bool)


def signed_matrix(points: np.ndarray, dim: int) -> np.ndarray:
    """(n, dim) int8 matrix of signed coordinates."""
    return (2 * bit_matrix(points, dim).T.astype(np.int8) - 1).astype(np.int8)


# ---------------------------------------------------------------------------
# predicates and hypothesis classes
# ---------------------------------------------------------------------------


class BooleanFunction:
    """Vectorized predicate {-1,+1}^dim -> {0,1} (True reads as +1 / label 1)."""

    def __init__(self, dim: int, fn: Callable[[np.ndarray], np.ndarray], name: str = "f"):
        self.dim = dim
        self._fn = fn
        self.name = name

    def __call__(self, points):
        scalar = np.isscalar(points) or isinstance(points, BitPoint)
        if isinstance(points, BitPoint):
            if points.dim != self.dim:
                raise DimMismatch(f"point dim {points.dim} != function dim {self.dim}")
            points = points.bits
        arr = np.atleast_1d(np.asarray(points, dtype=np.int64))
        out = np.asarray(self._fn(arr), dtype=bool)
        return int(out[0]) if scalar else out

    def signed(self, points) -> np.ndarray:
        return 2 * self(points).astype(np.int64) - 1

    @cached_property
    def truth_table(self) -> np.ndarray:
        return self(cube(self.dim))

    @classmethod
    def from_truth_table(cls, table, name: str = "f") -> "BooleanFunction":
        table = np.asarray(table, dtype=bool)
        dim = int(table.size).bit_length() - 1
        if dim < 1 or table.size != 1 << dim:
            raise DimMismatch(f"truth table length {table.size} is not a power of two >= 2")
        f = cls(dim, lambda pts: table[pts], name)
        f.__dict__["truth_table"] = table
        return f

    def __repr__(self):
        return f"BooleanFunction({self.name!r}, dim={self.dim})"


@dataclass(frozen=True)
class Hypothesis:
    name: str
    dim: int
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    coordinate: int | None = None

    def evaluate(self, points) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(points, dtype=np.int64)), dtype=bool)

    def __call__(self, point) -> int:
        if isinstance(point, BitPoint):
            point = point.bits
        return int(self.evaluate(np.array([point]))[0])


def projection(i: int, dim: int) -> Hypothesis:
    """proj_i(x) = 1[x_i = +1]."""
    if not 0 <= i < dim:
        raise OutOfRange(f"coordinate {i} outside [0, {dim})")
    return Hypothesis(f"x{i + 1}", dim, lambda pts, i=i: (pts >> i) & 1 == 1, coordinate=i)


class HypothesisClass:
    """Finite indexed family of splitting predicates; index order breaks ties."""

    def __init__(self, hypotheses: Iterable[Hypothesis], name: str = "custom"):
        self.hypotheses = tuple(hypotheses)
        if not self.hypotheses:
            raise EmptyHypothesisClass("hypothesis class is empty")
        dims = {h.dim for h in self.hypotheses}
        if len(dims) != 1:
            raise DimMismatch(f"hypotheses disagree on dim: {sorted(dims)}")
        self.dim = dims.pop()
        self.name = name

    @classmethod
    def projections(cls, dim: int) -> "HypothesisClass":
        return cls((projection(i, dim) for i in range(dim)), name="projections")

    @property
    def is_projections(self) -> bool:
        return all(h.coordinate == i for i, h in enumerate(self.hypotheses)) and len(self) == self.dim

    def __len__(self):
        return len(self.hypotheses)

    def __getitem__(self, i) -> Hypothesis:
        return self.hypotheses[i]

    def __iter__(self):
        return iter(self.hypotheses)

    def evaluate_matrix(self, points) -> np.ndarray:
        """(|H|, n) boolean matrix of hypothesis values."""
        points = np.asarray(points, dtype=np.int64)
        if self.is_projections:
            return bit_matrix(points, self.dim)
        return np.stack([h.evaluate(points) for h in self.hypotheses]) if len(points) else np.zeros((len(self), 0), bool)

    def extended(self, extra: Iterable[Hypothesis], name: str | None = None) -> "HypothesisClass":
        return HypothesisClass(self.hypotheses + tuple(extra), name or f"{self.name}+")


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Moments:
    weight: float
    mu: float

    @property
    def var(self) -> float:
        return self.mu * (1.0 - self.mu)


class LabeledDistribution:
    """Joint distribution over {-1,+1}^dim x {0,1}.

    Both modes are held as weighted rows: unique points with a mass and a
    conditional positive rate.  Empirical mode additionally keeps the integer
    counts so the underlying multiset of records can be reproduced exactly.
    """

    EXPLICIT = "explicit"
    EMPIRICAL = "empirical"

    def __init__(self, dim, points, mass, rate, mode, counts=None, positives=None):
        self.dim = int(dim)
        self.points = np.asarray(points, dtype=np.int64)
        self.mass = np.asarray(mass, dtype=np.float64)
        self.rate = np.asarray(rate, dtype=np.float64)
        self.mode = mode
        self.counts = None if counts is None else np.asarray(counts, dtype=np.int64)
        self.positives = None if positives is None else np.asarray(positives, dtype=np.int64)
        for arr in (self.points, self.mass, self.rate):
            arr.setflags(write=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_arrays(cls, dim, points, mass, rate) -> "LabeledDistribution":
        """Explicit distribution from parallel arrays, validated."""
        if not 1 <= dim <= MAX_EXPLICIT_DIM:
            raise OutOfRange(f"explicit mode supports 1 <= d <= {MAX_EXPLICIT_DIM}, got {dim}")
        points = np.asarray(points, dtype=np.int64)
        mass = np.asarray(mass, dtype=np.float64)
        rate = np.asarray(rate, dtype=np.float64)
        if not (points.shape == mass.shape == rate.shape) or points.ndim != 1:
            raise ValueError("points, mass and rate must be 1-D arrays of equal length")
        if len(points) == 0:
            raise NonNormalized("empty table")
        if np.any(points < 0) or np.any(points >> dim):
            raise DimMismatch(f"point outside {{-1,+1}}^{dim}")
        if np.any(mass < 0) or not np.all(np.isfinite(mass)):
            raise NonNormalized("masses must be finite and non-negative")
        if np.any(rate < 0) or np.any(rate > 1):
            raise OutOfRange("positive rates must lie in [0, 1]")
        total = math.fsum(mass.tolist())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NonNormalized(f"masses sum to {total!r}, not 1")
        order = np.argsort(points, kind="stable")
        points, mass, rate = points[order], mass[order], rate[order]
        if len(points) > 1 and np.any(points[1:] == points[:-1]):
            dup = points[1:][points[1:] == points[:-1]][0]
            raise DuplicatePoint(f"point {format_bits(int(dup), dim)} listed twice")
        return cls(dim, points, mass, rate, cls.EXPLICIT)

    @classmethod
    def from_function(cls, f: BooleanFunction, marginal=None) -> "LabeledDistribution":
        """Deterministic labels y = f(x) under a marginal (default uniform)."""
        pts = cube(f.dim)
        mass = np.full(len(pts), 1.0 / len(pts)) if marginal is None else np.asarray(marginal, dtype=np.float64)
        if mass.shape != pts.shape:
            raise DimMismatch("marginal length does not match 2^dim")
        return cls.from_arrays(f.dim, pts, mass, f.truth_table.astype(np.float64))

    @classmethod
    def empirical(cls, points, labels, dim) -> "LabeledDistribution":
        points = np.asarray(points, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if len(points) == 0:
            raise NonNormalized("empirical sample is empty")
        if points.shape != labels.shape:
            raise ValueError("points and labels must have equal length")
        if np.any((labels != 0) & (labels != 1)):
            raise OutOfRange("labels must be 0 or 1")
        uniq, inverse = np.unique(points, return_inverse=True)
        counts = np.bincount(inverse)
        positives = np.bincount(inverse, weights=labels).astype(np.int64)
        return cls.from_counts(dim, uniq, counts, positives)

    @classmethod
    def from_counts(cls, dim, points, counts, positives) -> "LabeledDistribution":
        """Empirical distribution from a compressed multiset."""
        points = np.asarray(points, dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        positives = np.asarray(positives, dtype=np.int64)
        if np.any(points < 0) or np.any(points >> dim):
            raise DimMismatch(f"point outside {{-1,+1}}^{dim}")
        if np.any(positives < 0) or np.any(positives > counts):
            raise OutOfRange("positive counts must lie in [0, count]")
        keep = counts > 0
        points, counts, positives = points[keep], counts[keep], positives[keep]
        order = np.argsort(points, kind="stable")
        points, counts, positives = points[order], counts[order], positives[order]
        if len(points) > 1 and np.any(points[1:] == points[:-1]):
            raise DuplicatePoint("points must be unique in a counts table")
        n = int(counts.sum())
        if n == 0:
            raise NonNormalized("empirical sample is empty")
        return cls(dim, points, counts / n, positives / counts, cls.EMPIRICAL, counts, positives)

    # -- queries -------------------------------------------------------------

    @property
    def is_explicit(self) -> bool:
        return self.mode == self.EXPLICIT

    @property
    def n(self) -> int:
        """Number of records (empirical) or support rows (explicit)."""
        return int(self.counts.sum()) if self.counts is not None else len(self.points)

    @property
    def positive_mass(self) -> np.ndarray:
        return self.mass * self.rate

    def moments(self) -> Moments:
        return self.view().moments()

    @property
    def mu(self) -> float:
        return self.moments().mu

    def view(self, path=()) -> "ConditionedView":
        return ConditionedView(self, tuple(path))

    def records(self) -> Iterator[tuple[int, int]]:
        """Records in canonical (point, label) order."""
        if self.counts is None:
            raise ValueError("records() needs an empirical distribution")
        for p, c, k in zip(self.points.tolist(), self.counts.tolist(), self.positives.tolist()):
            for _ in range(c - k):
                yield p, 0
            for _ in range(k):
                yield p, 1

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """(mass, positive mass) indexed by every point of the cube."""
        size = 1 << self.dim
        mass = np.zeros(size)
        pos = np.zeros(size)
        np.add.at(mass, self.points, self.mass)
        np.add.at(pos, self.points, self.positive_mass)
        return mass, pos

    def joint(self) -> dict[tuple[int, int], float]:
        """Mass of each (point, label) cell with positive mass."""
        out = {}
        for p, m, q in zip(self.points.tolist(), self.mass.tolist(), self.rate.tolist()):
            if m * q > 0:
                out[(p, 1)] = out.get((p, 1), 0.0) + m * q
            if m * (1 - q) > 0:
                out[(p, 0)] = out.get((p, 0), 0.0) + m * (1 - q)
        return out

    def as_explicit(self) -> "LabeledDistribution":
        if self.is_explicit:
            return self
        return LabeledDistribution(self.dim, self.points, self.mass, self.rate, self.EXPLICIT)

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"dim={self.dim}"]
        for p, m, q in zip(self.points.tolist(), self.mass.tolist(), self.rate.tolist()):
            lines.append(f"{format_bits(p, self.dim)} {m:.17g} {q:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LabeledDistribution":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or not lines[0].startswith("dim="):
            raise ValueError("missing 'dim=<d>' header")
        dim = int(lines[0][4:])
        pts, mass, rate = [], [], []
        for ln in lines[1:]:
            bits, m, q = ln.split()
            if len(bits) != dim:
                raise DimMismatch(f"row {bits!r} does not have {dim} coordinates")
            pts.append(parse_bits(bits))
            mass.append(float(m))
            rate.append(float(q))
        return cls.from_arrays(dim, pts, mass, rate)

    def __repr__(self):
        return f"LabeledDistribution(mode={self.mode}, dim={self.dim}, rows={len(self.points)})"


def make_explicit(table: Iterable[tuple], dim: int | None = None) -> LabeledDistribution:
    """Build an explicit distribution from ``(point, mass, positive_rate)`` rows.

    Points may be :class:`BitPoint` instances, bitstrings or signed tuples;
    plain integers need ``dim``.
    """
    pts, mass, rate = [], [], []
    dims = set() if dim is None else {dim}
    for point, m, q in table:
        if isinstance(point, BitPoint):
            dims.add(point.dim)
            point = point.bits
        elif isinstance(point, str):
            dims.add(len(point))
            point = parse_bits(point)
        elif isinstance(point, (tuple, list)):
            bp = BitPoint.from_signed(point)
            dims.add(bp.dim)
            point = bp.bits
        pts.append(int(point))
        mass.append(m)
        rate.append(q)
    if len(dims) != 1:
        raise DimMismatch(f"points disagree on dim: {sorted(dims)}" if dims else "dim required for integer points")
    return LabeledDistribution.from_arrays(dims.pop(), pts, mass, rate)


def uniform_distribution(f: BooleanFunction) -> LabeledDistribution:
    return LabeledDistribution.from_function(f)


# ---------------------------------------------------------------------------
# conditioning
# ---------------------------------------------------------------------------


class ConditionedView:
    """A distribution conditioned on a conjunction of (hypothesis, bit) literals."""

    def __init__(self, base: LabeledDistribution, path: tuple = ()):
        for h, b in path:
            if h.dim != base.dim:
                raise DimMismatch(f"hypothesis {h.name} has dim {h.dim}, distribution has {base.dim}")
            if b not in (0, 1):
                raise OutOfRange(f"branch bit must be 0 or 1, got {b}")
        self.base = base
        self.path = path

    @cached_property
    def mask(self) -> np.ndarray:
        mask = np.ones(len(self.base.points), dtype=bool)
        for h, b in self.path:
            mask &= h.evaluate(self.base.points) == bool(b)
        return mask

    @cached_property
    def weight(self) -> float:
        return float(self.base.mass[self.mask].sum())

    @property
    def degenerate(self) -> bool:
        return self.weight == 0.0

    @property
    def points(self) -> np.ndarray:
        return self.base.points[self.mask]

    @property
    def mass(self) -> np.ndarray:
        """Conditional masses (renormalized)."""
        if self.degenerate:
            raise ZeroWeight("view has zero weight")
        return self.base.mass[self.mask] / self.weight

    @property
    def rate(self) -> np.ndarray:
        return self.base.rate[self.mask]

    def moments(self) -> Moments:
        if self.degenerate:
            raise ZeroWeight("view has zero weight; conditional moments are undefined")
        pos = float((self.base.mass * self.base.rate)[self.mask].sum())
        mu = min(max(pos / self.weight, 0.0), 1.0)
        return Moments(self.weight, mu)

    def condition(self, path) -> "ConditionedView":
        return ConditionedView(self.base, self.path + tuple(path))

    def as_distribution(self) -> LabeledDistribution:
        """The conditional distribution as a standalone explicit table."""
        return LabeledDistribution(self.base.dim, self.points, self.mass, self.rate, self.base.mode)


def condition(dist, path) -> ConditionedView:
    if isinstance(dist, ConditionedView):
        return dist.condition(path)
    return ConditionedView(dist, tuple(path))


def moments(view) -> tuple[float, float, float]:
    """(w, mu, Var[y]) of a view or distribution."""
    m = view.moments()
    return m.weight, m.mu, m.var


# ---------------------------------------------------------------------------
# restrictions
# ---------------------------------------------------------------------------

STAR = None


@dataclass(frozen=True)
class Restriction:
    """Partial assignment in {-1, +1, *}^dim; ``None`` marks a free coordinate."""

    values: tuple

    def __post_init__(self):
        for v in self.values:
            if v not in (-1, 1, None):
                raise OutOfRange(f"restriction entries must be -1, +1 or None, got {v!r}")

    @classmethod
    def parse(cls, text: str) -> "Restriction":
        table = {"-": -1, "+": 1, "*": None}
        return cls(tuple(table[c] for c in text))

    @classmethod
    def free(cls, dim: int) -> "Restriction":
        return cls((None,) * dim)

    def __str__(self):
        return "".join({-1: "-", 1: "+", None: "*"}[v] for v in self.values)

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def specified_count(self) -> int:
        return sum(v is not None for v in self.values)

    @property
    def free_coords(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v is None)

    @property
    def fixed_bits(self) -> int:
        return sum(1 << i for i, v in enumerate(self.values) if v == 1)

    def project(self, points) -> np.ndarray:
        """Map (d - |rho|)-bit inputs onto the consistent subcube."""
        points = np.asarray(points, dtype=np.int64)
        out = np.full(points.shape, self.fixed_bits, dtype=np.int64)
        for j, i in enumerate(self.free_coords):
            out |= ((points >> j) & 1) << i
        return out

    def consistent(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64)
        mask = np.ones(points.shape, dtype=bool)
        for i, v in enumerate(self.values):
            if v is not None:
                mask &= ((points >> i) & 1) == (1 if v == 1 else 0)
        return mask

    def consistent_points(self) -> np.ndarray:
        return self.project(np.arange(1 << (self.dim - self.specified_count), dtype=np.int64))

    def to_path(self, dim: int | None = None) -> tuple:
        dim = self.dim if dim is None else dim
        return tuple((projection(i, dim), 1 if v == 1 else 0) for i, v in enumerate(self.values) if v is not None)


def apply_restriction(f: BooleanFunction, rho: Restriction) -> BooleanFunction:
    """f_rho(x) = f(proj_rho(x)) on the free coordinates."""
    if rho.dim != f.dim:
        raise DimMismatch(f"restriction dim {rho.dim} != function dim {f.dim}")
    free = f.dim - rho.specified_count
    if free == 0:
        value = bool(f(rho.fixed_bits))
        # a 0-dim function is represented on one dummy coordinate
        return BooleanFunction(1, lambda pts: np.full(pts.shape, value), f"{f.name}|{rho}")
    return BooleanFunction(free, lambda pts: f(rho.project(pts)), f"{f.name}|{rho}")


# ---------------------------------------------------------------------------
# decision trees
# ---------------------------------------------------------------------------


@dataclass
class Leaf:
    label: int


@dataclass
class Split:
    hyp: int
    low: "Leaf | Split"  # branch h(x) = 0
    high: "Leaf | Split"  # branch h(x) = 1


class DecisionTree:
    def __init__(self, root, hypotheses: HypothesisClass):
        self.root = root
        self.hypotheses = hypotheses
        self.dim = hypotheses.dim

    @classmethod
    def leaf(cls, label: int, hypotheses: HypothesisClass) -> "DecisionTree":
        return cls(Leaf(int(label)), hypotheses)

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64)
        out = np.zeros(points.shape, dtype=bool)
        stack = [(self.root, np.arange(len(points)))]
        while stack:
            node, idx = stack.pop()
            if isinstance(node, Leaf):
                out[idx] = bool(node.label)
                continue
            go_high = self.hypotheses[node.hyp].evaluate(points[idx])
            stack.append((node.low, idx[~go_high]))
            stack.append((node.high, idx[go_high]))
        return out

    def __call__(self, point) -> int:
        if isinstance(point, BitPoint):
            if point.dim != self.dim:
                raise DimMismatch(f"point dim {point.dim} != tree dim {self.dim}")
            point = point.bits
        node = self.root
        while isinstance(node, Split):
            node = node.high if self.hypotheses[node.hyp](point) else node.low
        return node.label

    def leaves(self) -> Iterator[tuple[tuple, Leaf]]:
        """(path, leaf) pairs; a path is a tuple of (hypothesis index, bit)."""
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            if isinstance(node, Leaf):
                yield path, node
            else:
                stack.append((path + ((node.hyp, 1),), node.high))
                stack.append((path + ((node.hyp, 0),), node.low))

    @property
    def size(self) -> int:
        return sum(1 for _ in self.leaves())

    @property
    def depth(self) -> int:
        return max(len(p) for p, _ in self.leaves())

    def internal_count(self) -> int:
        count, stack = 0, [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Split):
                count += 1
                stack.extend((node.low, node.high))
        return count

    def as_function(self) -> BooleanFunction:
        return BooleanFunction(self.dim, self.evaluate, "tree")

    # preorder text: "node split=<index>" / "leaf label=<0|1>"
    def to_text(self) -> str:
        lines = [f"dim={self.dim} class={self.hypotheses.name}"]

        def walk(node):
            if isinstance(node, Leaf):
                lines.append(f"leaf label={node.label}")
            else:
                lines.append(f"node split={node.hyp}")
                walk(node.low)
                walk(node.high)

        walk(self.root)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, hypotheses: HypothesisClass | None = None) -> "DecisionTree":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        header = dict(tok.split("=", 1) for tok in lines[0].split())
        dim = int(header["dim"])
        if hypotheses is None:
            if header.get("class") != "projections":
                raise ValueError("non-projection trees need their hypothesis class")
            hypotheses = HypothesisClass.projections(dim)
        if hypotheses.dim != dim:
            raise DimMismatch(f"tree dim {dim} != hypothesis class dim {hypotheses.dim}")
        it = iter(lines[1:])

        def read():
            kind, arg = next(it).split()
            key, value = arg.split("=")
            if kind == "leaf":
                return Leaf(int(value))
            low = read()
            high = read()
            return Split(int(value), low, high)

        root = read()
        if next(it, None) is not None:
            raise ValueError("trailing lines after tree")
        return cls(root, hypotheses)


def eval_tree(tree: DecisionTree, point) -> int:
    return tree(point)


def tree_as_function(tree: DecisionTree) -> BooleanFunction:
    return tree.as_function()


def tree_size_and_depth(tree: DecisionTree, dist: LabeledDistribution | None = None) -> tuple[int, int, float]:
    """(leaf count, max depth, expected depth) with the expectation under ``dist``'s marginal
    (uniform over the cube when omitted)."""
    if dist is None:
        pts = cube(tree.dim)
        mass = np.full(len(pts), 1.0 / len(pts))
    else:
        if dist.dim != tree.dim:
            raise DimMismatch(f"distribution dim {dist.dim} != tree dim {tree.dim}")
        pts, mass = dist.points, dist.mass
    size, depth, expected = 0, 0, 0.0
    for path, _ in tree.leaves():
        size += 1
        depth = max(depth, len(path))
        mask = np.ones(len(pts), dtype=bool)
        for h, b in path:
            mask &= tree.hypotheses[h].evaluate(pts) == bool(b)
        expected += len(path) * float(mass[mask].sum())
    return size, depth, expected
