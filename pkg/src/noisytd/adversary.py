"""Noise models and the zero-gain lower-bound construction.

Samples are compressed multisets (see ``LabeledDistribution.from_counts``);
record ``i`` is the i-th entry of the canonical (point, label) ordering.
When an adversary picks m records it draws how many come from each
(point, label) group and takes the first copies of every group, which is a
uniformly random subset up to swapping identical records.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cube import MAX_EXPLICIT_DIM, HypothesisClass, LabeledDistribution, format_bits
from .errors import DimMismatch, InfeasibleParameters, InvariantFailure, OutOfRange
from .targets import TribesSpec, tribes, tribes_params_for

NASTY_STRATEGIES = ("random-replace", "flip-agreeing-labels", "correlation-cancel")
AGNOSTIC_STRATEGIES = ("random-flip", "flip-agreeing-labels")


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------


def draw_sample(dist: LabeledDistribution, n: int, rng) -> LabeledDistribution:
    """n i.i.d. records from ``dist`` as a compressed empirical distribution."""
    if n < 1:
        raise OutOfRange("sample size must be >= 1")
    rng = np.random.default_rng(rng)
    counts = rng.multinomial(n, dist.mass / dist.mass.sum())
    positives = rng.binomial(counts, dist.rate)
    return LabeledDistribution.from_counts(dist.dim, dist.points, counts, positives)


def _groups(sample: LabeledDistribution):
    """(points, labels, counts) of the (point, label) groups in canonical order."""
    if sample.counts is None:
        raise ValueError("sample corruption needs an empirical distribution")
    n_groups = 2 * len(sample.points)
    pts = np.repeat(sample.points, 2)
    labels = np.tile(np.array([0, 1], dtype=np.int64), len(sample.points))
    counts = np.empty(n_groups, dtype=np.int64)
    counts[0::2] = sample.counts - sample.positives
    counts[1::2] = sample.positives
    return pts, labels, counts


def _budget(eta: float, n: int) -> int:
    if not 0 <= eta < 1:
        raise OutOfRange(f"noise rate must lie in [0, 1), got {eta}")
    return int(math.floor(eta * n + 1e-9))


def _pick(counts: np.ndarray, eligible: np.ndarray, m: int, rng) -> np.ndarray:
    """How many records to take from each group (first copies), m in total."""
    avail = np.where(eligible, counts, 0)
    m = min(m, int(avail.sum()))
    if m == 0:
        return np.zeros_like(counts)
    return rng.multivariate_hypergeometric(avail, m)


# ---------------------------------------------------------------------------
# corruption plans
# ---------------------------------------------------------------------------


@dataclass
class CorruptionPlan:
    """Audit trail of a corruption.

    Sample edits are stored grouped: ``taken[g]`` records of group ``g``
    (its first copies) were rewritten, the j-th of them into
    ``(after_points[...], after_labels[...])`` in order.
    """

    model: str
    eta: float
    strategy: str = ""
    seed: int | None = None
    dim: int = 0
    group_points: np.ndarray | None = field(default=None, repr=False)
    group_labels: np.ndarray | None = field(default=None, repr=False)
    group_offsets: np.ndarray | None = field(default=None, repr=False)
    taken: np.ndarray | None = field(default=None, repr=False)
    after_points: np.ndarray | None = field(default=None, repr=False)
    after_labels: np.ndarray | None = field(default=None, repr=False)
    component: LabeledDistribution | None = None  # E for a shift mixture

    @property
    def edit_count(self) -> int:
        return 0 if self.taken is None else int(self.taken.sum())

    def changed_count(self) -> int:
        """Edits whose record actually differs from the original."""
        if self.edit_count == 0:
            return 0
        bp, bl = self._before()
        return int(np.count_nonzero((bp != self.after_points) | (bl != self.after_labels)))

    def _before(self):
        g = np.repeat(np.arange(len(self.taken)), self.taken)
        return self.group_points[g], self.group_labels[g]

    def indices(self) -> np.ndarray:
        g = np.repeat(np.arange(len(self.taken)), self.taken)
        starts = np.repeat(np.cumsum(self.taken) - self.taken, self.taken)
        return self.group_offsets[g] + (np.arange(len(g)) - starts)

    def rows(self):
        """(index, before_point, before_label, after_point, after_label) per edit, sorted by index."""
        if self.edit_count == 0:
            return
        idx = self.indices()
        bp, bl = self._before()
        for j in np.argsort(idx, kind="stable"):
            yield (int(idx[j]), format_bits(int(bp[j]), self.dim), int(bl[j]),
                   format_bits(int(self.after_points[j]), self.dim), int(self.after_labels[j]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("index", "before_point", "before_label", "after_point", "after_label"))
        for row in self.rows():
            w.writerow(row)
        return buf.getvalue()


def _apply(sample, pts, labels, counts, taken, new_pts, new_labels, plan_kw) -> tuple:
    remaining = counts - taken
    all_pts = np.concatenate((pts, new_pts))
    all_lab = np.concatenate((labels, new_labels))
    all_cnt = np.concatenate((remaining, np.ones(len(new_pts), dtype=np.int64)))
    uniq, inv = np.unique(all_pts, return_inverse=True)
    c = np.bincount(inv, weights=all_cnt, minlength=len(uniq)).astype(np.int64)
    k = np.bincount(inv, weights=all_cnt * all_lab, minlength=len(uniq)).astype(np.int64)
    out = LabeledDistribution.from_counts(sample.dim, uniq, c, k)
    offsets = np.cumsum(counts) - counts
    plan = CorruptionPlan(dim=sample.dim, group_points=pts, group_labels=labels, group_offsets=offsets,
                          taken=taken, after_points=new_pts, after_labels=new_labels, **plan_kw)
    return out, plan


def strongest_hypothesis(sample: LabeledDistribution, H: HypothesisClass | None = None) -> tuple[int, float]:
    """(index, signed covariance) of the hypothesis most correlated with the label."""
    H = HypothesisClass.projections(sample.dim) if H is None else H
    hm = H.evaluate_matrix(sample.points).astype(np.float64)
    m, pos = sample.mass, sample.positive_mass
    cov = hm @ pos - (hm @ m) * pos.sum()
    j = int(np.argmax(np.abs(cov)))
    return j, float(cov[j])


def _agreeing(sample, pts, labels, H):
    j, cov = strongest_hypothesis(sample, H)
    H = HypothesisClass.projections(sample.dim) if H is None else H
    hv = H[j].evaluate(pts).astype(np.int64)
    return (labels == hv) if cov >= 0 else (labels != hv)


def corrupt_sample_nasty(sample: LabeledDistribution, eta: float, strategy: str = "random-replace",
                         seed: int = 0, k: int | None = None, hypotheses: HypothesisClass | None = None):
    """Rewrite at most floor(eta n) records; returns (corrupted sample, plan).

    random-replace: random records become uniform random (point, label) pairs.
    flip-agreeing-labels: flip labels where the most correlated hypothesis agrees with y.
    correlation-cancel: random records become draws (x = (-y,...,-y) o z, y) with k copies.
    """
    if strategy not in NASTY_STRATEGIES:
        raise OutOfRange(f"nasty strategy must be one of {NASTY_STRATEGIES}, got {strategy!r}")
    rng = np.random.default_rng(seed)
    pts, labels, counts = _groups(sample)
    m = _budget(eta, sample.n)
    kw = dict(model="nasty", eta=eta, strategy=strategy, seed=seed)
    if strategy == "flip-agreeing-labels":
        taken = _pick(counts, _agreeing(sample, pts, labels, hypotheses), m, rng)
        g = np.repeat(np.arange(len(taken)), taken)
        return _apply(sample, pts, labels, counts, taken, pts[g], 1 - labels[g], kw)
    taken = _pick(counts, counts > 0, m, rng)
    size = int(taken.sum())
    if strategy == "random-replace":
        new_pts = rng.integers(0, 1 << sample.dim, size=size, dtype=np.int64)
        new_labels = rng.integers(0, 2, size=size, dtype=np.int64)
    else:
        k = sample.dim if k is None else k
        if not 1 <= k <= sample.dim:
            raise OutOfRange(f"correlation-cancel needs 1 <= k <= d, got {k}")
        new_labels = rng.integers(0, 2, size=size, dtype=np.int64)
        z = rng.integers(0, 1 << (sample.dim - k), size=size, dtype=np.int64) << k
        head = np.where(new_labels == 1, 0, (1 << k) - 1)
        new_pts = head | z
    return _apply(sample, pts, labels, counts, taken, new_pts, new_labels, kw)


def corrupt_labels_agnostic(sample: LabeledDistribution, eta: float, strategy: str = "random-flip",
                            seed: int = 0, hypotheses: HypothesisClass | None = None):
    """Flip at most floor(eta n) labels; points are never moved."""
    if strategy not in AGNOSTIC_STRATEGIES:
        raise OutOfRange(f"agnostic strategy must be one of {AGNOSTIC_STRATEGIES}, got {strategy!r}")
    rng = np.random.default_rng(seed)
    pts, labels, counts = _groups(sample)
    m = _budget(eta, sample.n)
    eligible = counts > 0 if strategy == "random-flip" else _agreeing(sample, pts, labels, hypotheses)
    taken = _pick(counts, eligible, m, rng)
    g = np.repeat(np.arange(len(taken)), taken)
    return _apply(sample, pts, labels, counts, taken, pts[g], 1 - labels[g],
                  dict(model="agnostic", eta=eta, strategy=strategy, seed=seed))


def shift_mixture(D: LabeledDistribution, E: LabeledDistribution, eta: float) -> LabeledDistribution:
    """(1 - eta) D + eta E as an explicit table."""
    if D.dim != E.dim:
        raise DimMismatch(f"dims differ: {D.dim} vs {E.dim}")
    if not 0 <= eta < 1:
        raise OutOfRange(f"mixture weight must lie in [0, 1), got {eta}")
    if eta == 0:
        return D.as_explicit()
    mD, pD = D.dense()
    mE, pE = E.dense()
    mass = (1 - eta) * mD + eta * mE
    pos = (1 - eta) * pD + eta * pE
    keep = np.flatnonzero(mass > 0)
    rate = np.clip(pos[keep] / mass[keep], 0.0, 1.0)
    mass = mass[keep]
    return LabeledDistribution(D.dim, keep.astype(np.int64), mass / math.fsum(mass.tolist()), rate,
                               LabeledDistribution.EXPLICIT)


def shift_plan(E: LabeledDistribution, eta: float, seed: int | None = None) -> CorruptionPlan:
    return CorruptionPlan("shift", eta, "mixture", seed, E.dim, component=E)


# ---------------------------------------------------------------------------
# lower-bound instance
# ---------------------------------------------------------------------------


def largest_gamma(eps: float, tol: float = 1e-9) -> float:
    """Largest gamma in (0, 1) with gamma^(1/gamma) <= eps (the map is increasing on (0, 1))."""
    if not 0 < eps < 1:
        raise InfeasibleParameters(f"eps must lie in (0, 1), got {eps}")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid ** (1 / mid) <= eps:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class LowerBoundInstance:
    d: int
    eps: float
    gamma: float
    ell: int
    w: int
    s: int
    k: int
    v: Fraction  # E[x_i g(x)] in the signed view, i < k
    eta_exact: Fraction
    clean: LabeledDistribution = field(repr=False)
    component: LabeledDistribution = field(repr=False)
    corrupted: LabeledDistribution = field(repr=False)
    hypotheses: HypothesisClass = field(repr=False)

    @property
    def eta(self) -> float:
        return float(self.eta_exact)

    def cancellation_residual(self) -> float:
        """(1 - eta) v - eta evaluated in floating point."""
        v, eta = float(self.v), self.eta
        return (1 - eta) * v - eta

    def covariances(self, dist: LabeledDistribution | None = None) -> np.ndarray:
        """Cov[x_i, y] (signed x_i, 0/1 y) for every coordinate."""
        dist = self.corrupted if dist is None else dist
        xs = 2.0 * self.hypotheses.evaluate_matrix(dist.points) - 1.0
        m, pos = dist.mass, dist.positive_mass
        return xs @ pos - (xs @ m) * pos.sum()

    def label_bias(self) -> float:
        """min_b Pr_D[g = b]."""
        mu = self.clean.mu
        return min(mu, 1 - mu)

    @property
    def plan(self) -> CorruptionPlan:
        return shift_plan(self.component, self.eta)


def _cancel_component(d: int, k: int) -> LabeledDistribution:
    """y uniform, x = (-y, ..., -y) o z with z uniform on the last d - k coordinates."""
    z = np.arange(1 << (d - k), dtype=np.int64) << k
    head1 = z  # y = 1 (signed +1): first k coordinates are -1
    head0 = z | ((1 << k) - 1)  # y = 0 (signed -1): first k coordinates are +1
    pts = np.concatenate((head0, head1))
    mass = np.full(len(pts), 0.5 / len(z))
    rate = np.concatenate((np.zeros(len(z)), np.ones(len(z))))
    return LabeledDistribution.from_arrays(d, pts, mass, rate)


def build_lowerbound_instance(d: int, eps: float, gamma: float | None = None, constant: float = 1.0,
                              bias_factor: float = 2.0, check_tol: float = 1e-12) -> LowerBoundInstance:
    """Zero-gain corruption of a Tribes junta.

    The clean distribution labels a uniform x by g(x_1..x_k) with
    g = Tribes_{w,s} chosen so min_b Pr[g = b] >= bias_factor * eps on at
    most ell = ceil(constant log2(1/gamma) / gamma) variables.  Mixing in the
    label-anticorrelated component with weight eta = v / (1 + v) cancels
    every coordinate's covariance with the label.
    """
    if gamma is None:
        gamma = largest_gamma(eps)
    if not 0 < gamma < 1:
        raise InfeasibleParameters(f"gamma must lie in (0, 1), got {gamma}")
    if not 0 < eps < 1:
        raise InfeasibleParameters(f"eps must lie in (0, 1), got {eps}")
    if gamma ** (1 / gamma) > eps:
        raise InfeasibleParameters(f"gamma^(1/gamma) = {gamma ** (1 / gamma):.4g} exceeds eps = {eps}")
    if not 1 <= d <= MAX_EXPLICIT_DIM:
        raise InfeasibleParameters(f"explicit construction needs 1 <= d <= {MAX_EXPLICIT_DIM}")
    ell = min(math.ceil(constant * math.log2(1 / gamma) / gamma), d)
    floor = Fraction(str(eps)) * Fraction(str(bias_factor))
    w, s, k = tribes_params_for(floor, ell)
    if k > d:
        raise InfeasibleParameters(f"k = {k} exceeds d = {d}")
    spec = TribesSpec(w, s)
    v = spec.correlation()
    eta = v / (1 + v)
    clean = LabeledDistribution.from_function(tribes(w, s, d))
    E = _cancel_component(d, k)
    corrupted = shift_mixture(clean, E, float(eta))
    inst = LowerBoundInstance(d, eps, gamma, ell, w, s, k, v, eta, clean, E, corrupted,
                              HypothesisClass.projections(d))
    cov = inst.covariances()
    if np.max(np.abs(cov)) > check_tol:
        raise InvariantFailure(f"corrupted covariances not cancelled: max |Cov| = {np.max(np.abs(cov)):.3g}")
    return inst
