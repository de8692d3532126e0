"""Greedy top-down decision tree growth driven by an impurity function.

At each step the learner scans every (leaf, hypothesis) pair, splits the pair
with the largest weighted purity gain, and finally labels each leaf with the
majority label ``1[mu > 1/2]``.  Quantities are exact expectations for
explicit distributions and plain frequencies for empirical ones.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import impurity as imp
from .cube import DecisionTree, HypothesisClass, LabeledDistribution, Leaf, Split, bit_matrix
from .errors import DimMismatch, EmptyHypothesisClass, OutOfRange

TIE_POLICIES = ("lowest", "highest", "random")


@dataclass
class TrainConfig:
    t: int
    impurity: imp.ImpurityFn = field(default_factory=imp.gini)
    hypotheses: HypothesisClass | None = None  # None: coordinate projections
    tie_break: str = "lowest"
    seed: int = 0  # used by the "random" tie policy
    min_gain: float = 1e-12

    def __post_init__(self):
        if self.t < 1:
            raise OutOfRange(f"size bound t must be >= 1, got {self.t}")
        if self.tie_break not in TIE_POLICIES:
            raise OutOfRange(f"tie_break must be one of {TIE_POLICIES}, got {self.tie_break!r}")


@dataclass(frozen=True)
class Step:
    iter: int
    leaf_id: int
    hyp_id: int
    weighted_gain: float
    g_before: float
    g_after: float
    err_before: float
    err_after: float
    leaves_after: int
    monitor_before: tuple = ()
    monitor_after: tuple = ()
    scan_cost: int = 0  # rows x hypotheses evaluated this iteration


@dataclass
class TrainTrace:
    steps: list = field(default_factory=list)
    g_initial: float = 0.0
    err_initial: float = 0.0
    monitor_initial: tuple = ()

    CSV_COLUMNS = ("iter", "leaf_id", "hyp_id", "weighted_gain", "g_before", "g_after", "err_before", "err_after")

    def __len__(self):
        return len(self.steps)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for s in self.steps:
            w.writerow([s.iter, s.leaf_id, s.hyp_id] + [repr(float(getattr(s, c))) for c in self.CSV_COLUMNS[3:]])
        return buf.getvalue()

    def errors_by_size(self) -> dict[int, float]:
        """Training error of the prefix tree with the given leaf count."""
        out = {1: self.err_initial}
        for s in self.steps:
            out[s.leaves_after] = s.err_after
        return out

    def g_by_size(self) -> dict[int, float]:
        out = {1: self.g_initial}
        for s in self.steps:
            out[s.leaves_after] = s.g_after
        return out

    def monitor_by_size(self, k: int = 0) -> dict[int, float]:
        out = {1: self.monitor_initial[k]}
        for s in self.steps:
            out[s.leaves_after] = s.monitor_after[k]
        return out


class _Rows:
    """A distribution routed through the growing tree."""

    def __init__(self, dist: LabeledDistribution, hyps: HypothesisClass):
        if dist.dim != hyps.dim:
            raise DimMismatch(f"distribution dim {dist.dim} != hypothesis dim {hyps.dim}")
        self.points = dist.points
        self.mass = dist.mass
        self.pos = dist.mass * dist.rate
        self.rate = dist.rate
        self.hyps = hyps
        self._hmat = None if hyps.is_projections else hyps.evaluate_matrix(dist.points)

    def masks(self, idx: np.ndarray) -> np.ndarray:
        if self._hmat is None:
            return bit_matrix(self.points[idx], self.hyps.dim)
        return self._hmat[:, idx]

    def branch(self, idx: np.ndarray, h: int) -> np.ndarray:
        if self._hmat is None:
            return ((self.points[idx] >> h) & 1).astype(bool)
        return self._hmat[h, idx]


class _LeafState:
    __slots__ = ("id", "node", "parent", "side", "idx", "mon", "W", "P", "W1", "P1", "gains", "valid", "pure")


class _Grower:
    """Mutable tree under construction plus per-leaf split statistics."""

    def __init__(self, dist, hyps, G, monitors=()):
        self.rows = _Rows(dist, hyps)
        self.monitors = [_Rows(m, hyps) for m in monitors]
        self.hyps = hyps
        self.G = G
        self.next_id = 0
        self.root = None
        self.leaves: list[_LeafState] = []
        self.scan_cost = 0
        all_idx = np.arange(len(dist.points))
        self.leaves.append(self._make_leaf(all_idx, [np.arange(len(m.points)) for m in self.monitors], None, None))

    def _make_leaf(self, idx, mon, parent, side) -> _LeafState:
        lf = _LeafState()
        lf.id = self.next_id
        self.next_id += 1
        lf.node = Leaf(0)
        lf.parent, lf.side = parent, side
        lf.idx, lf.mon = idx, mon
        m = self.rows.mass[idx]
        p = self.rows.pos[idx]
        lf.W = float(m.sum())
        lf.P = float(p.sum())
        masks = self.rows.masks(idx)
        lf.W1 = np.where(masks, m, 0.0).sum(axis=1)
        lf.P1 = np.where(masks, p, 0.0).sum(axis=1)
        lf.gains = imp.weighted_gain(self.G, lf.W, lf.P, lf.W1, lf.P1)
        lf.valid = (lf.W1 > 0) & (lf.W - lf.W1 > 0)
        r = self.rows.rate[idx][m > 0]
        lf.pure = r.size == 0 or bool(np.all(r == 0) or np.all(r == 1))
        self.scan_cost += masks.size
        if parent is None:
            self.root = lf.node
        return lf

    def split(self, pos: int, h: int) -> _LeafState:
        lf = self.leaves.pop(pos)
        go = self.rows.branch(lf.idx, h)
        mon_lo, mon_hi = [], []
        for rows, midx in zip(self.monitors, lf.mon):
            mgo = rows.branch(midx, h)
            mon_lo.append(midx[~mgo])
            mon_hi.append(midx[mgo])
        node = Split(h, None, None)
        lo = self._make_leaf(lf.idx[~go], mon_lo, node, "low")
        hi = self._make_leaf(lf.idx[go], mon_hi, node, "high")
        node.low, node.high = lo.node, hi.node
        if lf.parent is None:
            self.root = node
        else:
            setattr(lf.parent, lf.side, node)
        self.leaves.extend((lo, hi))
        return lf

    @staticmethod
    def _label(lf) -> int:
        return int(lf.W > 0 and lf.P / lf.W > 0.5)

    def g_value(self) -> float:
        return math.fsum(lf.W * self.G(lf.P / lf.W) for lf in self.leaves if lf.W > 0)

    def train_error(self) -> float:
        return math.fsum((lf.W - lf.P) if self._label(lf) else lf.P for lf in self.leaves)

    def monitor_errors(self) -> tuple:
        out = []
        for k, rows in enumerate(self.monitors):
            total = []
            for lf in self.leaves:
                idx = lf.mon[k]
                w, p = rows.mass[idx].sum(), rows.pos[idx].sum()
                total.append((w - p) if self._label(lf) else p)
            out.append(math.fsum(total))
        return tuple(out)

    def tree(self) -> DecisionTree:
        for lf in self.leaves:
            lf.node.label = self._label(lf)
        return DecisionTree(_copy(self.root), self.hyps)


def _copy(node):
    if isinstance(node, Leaf):
        return Leaf(node.label)
    return Split(node.hyp, _copy(node.low), _copy(node.high))


def _choose(grower: _Grower, cfg: TrainConfig, rng) -> tuple[int, int] | None:
    leaves = grower.leaves
    gains = np.stack([lf.gains for lf in leaves])
    valid = np.stack([lf.valid for lf in leaves])
    if not valid.any():
        return None
    if all(lf.pure for lf in leaves) and gains[valid].max() <= cfg.min_gain:
        return None
    best = gains[valid].max()
    tie = valid & (gains >= best - cfg.min_gain)
    if cfg.tie_break == "random":
        cand = np.argwhere(tie)
        li, h = cand[rng.integers(len(cand))]
        return int(li), int(h)
    li = int(np.argmax(tie.any(axis=1)))
    hs = np.flatnonzero(tie[li])
    return li, int(hs[0] if cfg.tie_break == "lowest" else hs[-1])


def train(dist: LabeledDistribution, cfg: TrainConfig, monitors=()) -> tuple[DecisionTree, TrainTrace]:
    """Grow a tree with at most ``cfg.t`` leaves on ``dist``.

    ``monitors`` are extra distributions (for example the clean distribution
    when training on a corrupted one); the trace records the error of every
    prefix tree on each of them.
    """
    hyps = cfg.hypotheses or HypothesisClass.projections(dist.dim)
    if len(hyps) == 0:
        raise EmptyHypothesisClass("no hypotheses to split on")
    grower = _Grower(dist, hyps, cfg.impurity, monitors)
    rng = np.random.default_rng(cfg.seed)
    trace = TrainTrace(g_initial=grower.g_value(), err_initial=grower.train_error(),
                       monitor_initial=grower.monitor_errors())
    g_now, err_now, mon_now = trace.g_initial, trace.err_initial, trace.monitor_initial
    it = 0
    while len(grower.leaves) < cfg.t:
        choice = _choose(grower, cfg, rng)
        if choice is None:
            break
        li, h = choice
        gain = float(grower.leaves[li].gains[h])
        grower.scan_cost = 0
        old = grower.split(li, h)
        g_next, err_next, mon_next = grower.g_value(), grower.train_error(), grower.monitor_errors()
        trace.steps.append(Step(it, old.id, h, gain, g_now, g_next, err_now, err_next, len(grower.leaves),
                                mon_now, mon_next, grower.scan_cost))
        g_now, err_now, mon_now = g_next, err_next, mon_next
        it += 1
    return grower.tree(), trace


def replay(dist: LabeledDistribution, hyps: HypothesisClass, splits, G=None) -> DecisionTree:
    """Rebuild a tree from a recorded (leaf_id, hyp_id) split sequence."""
    grower = _Grower(dist, hyps, G or imp.gini())
    for leaf_id, h in splits:
        pos = next(i for i, lf in enumerate(grower.leaves) if lf.id == leaf_id)
        grower.split(pos, h)
    return grower.tree()


def tree_at_size(dist, hyps, trace: TrainTrace, size: int, G=None) -> DecisionTree:
    splits = [(s.leaf_id, s.hyp_id) for s in trace.steps[: max(size - 1, 0)]]
    return replay(dist, hyps, splits, G)


def evaluate_error(tree: DecisionTree, dist: LabeledDistribution) -> float:
    """Pr[T(x) != y]: exact for explicit tables, the sample frequency otherwise."""
    if tree.dim != dist.dim:
        raise DimMismatch(f"tree dim {tree.dim} != distribution dim {dist.dim}")
    pred = tree.evaluate(dist.points)
    return math.fsum(np.where(pred, dist.mass * (1 - dist.rate), dist.mass * dist.rate).tolist())


def g_value(tree: DecisionTree, dist: LabeledDistribution, G: imp.ImpurityFn) -> float:
    """E over leaves of G(mu(D_leaf))."""
    total = []
    for path, _ in tree.leaves():
        mask = np.ones(len(dist.points), dtype=bool)
        for h, b in path:
            mask &= tree.hypotheses[h].evaluate(dist.points) == bool(b)
        w = dist.mass[mask].sum()
        if w > 0:
            total.append(w * G((dist.mass * dist.rate)[mask].sum() / w))
    return math.fsum(total)


# ---------------------------------------------------------------------------
# progress audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditRecord:
    iter: int
    leaves: int
    error: float
    e: float
    bound: float
    gain: float
    checked: bool
    passed: bool

    @property
    def margin(self) -> float:
        return self.gain - self.bound


def progress_audit(dist: LabeledDistribution, cfg: TrainConfig, gamma: float, eta: float = 0.0,
                   e: float | None = None, noise_constant: float = 12.0, tol: float = 1e-12) -> list[AuditRecord]:
    """Check the per-split drop  best weighted gain >= (kappa/8) 4 gamma^2 e^2 / s.

    A step is checked when the current training error is at least
    ``noise_constant * eta / gamma + e``.  With ``e=None`` the largest valid
    ``e`` is used, i.e. ``error - noise_constant * eta / gamma``.
    """
    if not dist.is_explicit:
        raise ValueError("progress_audit needs an explicit distribution")
    if cfg.impurity.kappa is None:
        raise ValueError(f"impurity {cfg.impurity.id} has no curvature constant")
    scale = cfg.impurity.kappa / 8.0
    _, trace = train(dist, cfg)
    offset = noise_constant * eta / gamma if gamma > 0 else math.inf
    out = []
    leaves = 1
    for step in trace.steps:
        err = step.err_before
        e_used = err - offset if e is None else e
        checked = e_used > 0 and err >= offset + e_used - tol
        bound = scale * 4 * gamma**2 * e_used**2 / leaves if checked else 0.0
        passed = (not checked) or step.weighted_gain >= bound - tol
        out.append(AuditRecord(step.iter, leaves, err, e_used, bound, step.weighted_gain, checked, passed))
        leaves = step.leaves_after
    return out


# ---------------------------------------------------------------------------
# sample size
# ---------------------------------------------------------------------------

SAMPLE_CONSTANT = 8.0


def sample_size_for(tau: float, t: int, class_size: int, confidence: float = 0.9,
                    constant: float = SAMPLE_CONSTANT) -> int:
    """n = ceil(c t^2 |H| ln(t |H| / (1 - confidence)) / tau^2)."""
    if not 0 < tau <= 0.5:
        raise OutOfRange(f"tolerance tau must lie in (0, 1/2], got {tau}")
    if not 0 < confidence < 1:
        raise OutOfRange(f"confidence must lie in (0, 1), got {confidence}")
    if t < 1 or class_size < 1:
        raise OutOfRange("t and class size must be >= 1")
    failure = 1.0 - confidence
    return math.ceil(constant * t * t * class_size * math.log(t * class_size / failure) / (tau * tau))
