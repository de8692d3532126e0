"""Boolean-function and distribution analysis.

Influence and covariance under product marginals, total-variation distance,
the moment/TV inequalities, the exact weak-learning-advantage verifier and
the OSSS/KKL influence oracles.  Everything is computed by full enumeration
of the cube, so values are exact up to float rounding.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cube import (
    MAX_EXPLICIT_DIM,
    BooleanFunction,
    DecisionTree,
    HypothesisClass,
    LabeledDistribution,
    Restriction,
    cube,
)
from .errors import DimMismatch, ExplosionGuard, NotMonotone, OutOfRange, ZeroWeight

# ---------------------------------------------------------------------------
# product distributions
# ---------------------------------------------------------------------------


class ProductDistribution:
    """Independent coordinates with Pr[x_i = +1] = p_i."""

    def __init__(self, p):
        p = np.asarray(p, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise OutOfRange("need at least one coordinate probability")
        if np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
            raise OutOfRange("coordinate probabilities must lie in [0, 1]")
        self.p = p
        self.q = 1.0 - p
        self.dim = p.size

    @classmethod
    def uniform(cls, dim: int) -> "ProductDistribution":
        return cls(np.full(dim, 0.5))

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.p == 0.5))

    def marginal(self) -> np.ndarray:
        """Mass of every cube point, indexed by its bit word."""
        if self.dim > MAX_EXPLICIT_DIM:
            raise OutOfRange(f"cannot materialize a marginal over {self.dim} coordinates")
        pts = cube(self.dim)
        mass = np.ones(len(pts))
        for i in range(self.dim):
            mass *= np.where((pts >> i) & 1, self.p[i], self.q[i])
        return mass

    def labeled(self, f: BooleanFunction) -> LabeledDistribution:
        return LabeledDistribution.from_function(f, self.marginal())

    def __repr__(self):
        return f"ProductDistribution({self.p.tolist()})"


def _as_marginal(dist, dim: int) -> np.ndarray:
    if dist is None:
        return np.full(1 << dim, 1.0 / (1 << dim))
    if isinstance(dist, ProductDistribution):
        if dist.dim != dim:
            raise DimMismatch(f"distribution dim {dist.dim} != function dim {dim}")
        return dist.marginal()
    if isinstance(dist, LabeledDistribution):
        if dist.dim != dim:
            raise DimMismatch(f"distribution dim {dist.dim} != function dim {dim}")
        return dist.dense()[0]
    arr = np.asarray(dist, dtype=np.float64)
    if arr.size != 1 << dim:
        raise DimMismatch("marginal length does not match 2^dim")
    return arr


def _values(a, dim: int) -> np.ndarray:
    """Real values of ``a`` on every cube point."""
    if isinstance(a, BooleanFunction):
        return a.signed(cube(dim)).astype(np.float64)
    if callable(a):
        return np.asarray(a(cube(dim)), dtype=np.float64)
    arr = np.asarray(a, dtype=np.float64)
    if arr.size != 1 << dim:
        raise DimMismatch("value table length does not match 2^dim")
    return arr


def coordinate(i: int, dim: int) -> np.ndarray:
    """Signed values of x_i over the cube."""
    return 2.0 * ((cube(dim) >> i) & 1) - 1.0


# ---------------------------------------------------------------------------
# influence and moments
# ---------------------------------------------------------------------------


def influence(f: BooleanFunction, P: ProductDistribution | None, i: int) -> float:
    """Inf_i(f) = 2 Pr_{x ~ P, b ~ P_i}[f(x) != f(x with x_i := b)]."""
    P = ProductDistribution.uniform(f.dim) if P is None else P
    if P.dim != f.dim:
        raise DimMismatch(f"distribution dim {P.dim} != function dim {f.dim}")
    if not 0 <= i < f.dim:
        raise OutOfRange(f"coordinate {i} outside [0, {f.dim})")
    pts = cube(f.dim)
    tt = f.truth_table
    mass = P.marginal()
    total = 0.0
    for b, pb in ((1, P.p[i]), (0, P.q[i])):
        moved = (pts & ~(1 << i)) | (b << i)
        total += pb * float(np.dot(mass, tt != tt[moved]))
    return 2.0 * total


def influences(f: BooleanFunction, P: ProductDistribution | None = None) -> np.ndarray:
    return np.array([influence(f, P, i) for i in range(f.dim)])


def covariance(a, b, dist=None, dim: int | None = None) -> float:
    """Cov[a, b] under a marginal over the cube.

    ``a`` and ``b`` may be BooleanFunctions (read in the signed view),
    vectorized callables or value tables over all 2^d points.
    """
    dim = dim or _infer_dim(a, b, dist)
    mass = _as_marginal(dist, dim)
    total = mass.sum()
    if total <= 0:
        raise ZeroWeight("marginal has zero mass")
    mass = mass / total
    av, bv = _values(a, dim), _values(b, dim)
    ea, eb = float(np.dot(mass, av)), float(np.dot(mass, bv))
    return float(np.dot(mass, (av - ea) * (bv - eb)))


def variance(a, dist=None, dim: int | None = None) -> float:
    return covariance(a, a, dist, dim)


def _infer_dim(*objs) -> int:
    for o in objs:
        if isinstance(o, (BooleanFunction, ProductDistribution, LabeledDistribution)):
            return o.dim
    for o in objs:
        if o is not None and not callable(o):
            return int(np.asarray(o).size).bit_length() - 1
    raise DimMismatch("cannot infer dimension; pass dim=")


def is_monotone(f: BooleanFunction) -> bool:
    """Brute-force check along single-bit increase edges."""
    tt = f.truth_table
    pts = cube(f.dim)
    for i in range(f.dim):
        low = pts[((pts >> i) & 1) == 0]
        if np.any(tt[low] & ~tt[low | (1 << i)]):
            return False
    return True


def inf_cov_identity_check(f: BooleanFunction, P: ProductDistribution | None = None) -> list[tuple[float, float]]:
    """(Inf_i(f), Cov[f, x_i]) for every coordinate of a monotone f."""
    if not is_monotone(f):
        raise NotMonotone(f"{f.name} is not monotone")
    P = ProductDistribution.uniform(f.dim) if P is None else P
    return [(influence(f, P, i), covariance(f, coordinate(i, f.dim), P)) for i in range(f.dim)]


# ---------------------------------------------------------------------------
# total variation
# ---------------------------------------------------------------------------


def _as_table(d) -> dict:
    if isinstance(d, LabeledDistribution):
        return d.joint()
    if isinstance(d, dict):
        return d
    arr = np.asarray(d)
    return {i: v for i, v in enumerate(arr.tolist())}


def tv_distance(a, b) -> float:
    """Half the L1 distance; labeled distributions are compared on the joint (x, y) space.

    Accepts LabeledDistributions, ``{outcome: prob}`` mappings (Fractions
    give exact results) or marginal arrays of equal length.
    """
    if isinstance(a, LabeledDistribution) and isinstance(b, LabeledDistribution) and a.dim != b.dim:
        raise DimMismatch(f"dims differ: {a.dim} vs {b.dim}")
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        if a.shape != b.shape:
            raise DimMismatch("marginal arrays differ in shape")
        return 0.5 * math.fsum(np.abs(a - b).tolist())
    ta, tb = _as_table(a), _as_table(b)
    diffs = [abs(ta.get(k, 0) - tb.get(k, 0)) for k in set(ta) | set(tb)]
    if any(isinstance(x, Fraction) for x in diffs):
        return sum(diffs, Fraction(0)) / 2
    return 0.5 * math.fsum(diffs)


@dataclass(frozen=True)
class MomentGapReport:
    eta: float
    d_mean: float  # |E1[f] - E2[f]|
    d_var: float  # |Var1[f] - Var2[f]|
    d_cov: float  # |Cov1[f, g] - Cov2[f, g]|
    tol: float = 1e-12

    @property
    def mean_ok(self) -> bool:
        return self.d_mean <= self.eta + self.tol

    @property
    def var_ok(self) -> bool:
        return self.d_var <= self.eta + self.tol

    @property
    def cov_ok(self) -> bool:
        return self.d_cov <= 2 * self.eta + self.tol

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.var_ok and self.cov_ok


def _moments(p, fv, gv):
    ef, eg = float(np.dot(p, fv)), float(np.dot(p, gv))
    var = float(np.dot(p, (fv - ef) ** 2))
    cov = float(np.dot(p, (fv - ef) * (gv - eg)))
    return ef, var, cov


def moment_gaps(p1, p2, fv, gv, tol: float = 1e-12) -> MomentGapReport:
    """Moment gaps for two distributions given as aligned probability vectors."""
    p1, p2 = np.asarray(p1, dtype=np.float64), np.asarray(p2, dtype=np.float64)
    fv, gv = np.asarray(fv, dtype=np.float64), np.asarray(gv, dtype=np.float64)
    if np.any(fv < 0) or np.any(fv > 1) or np.any(gv < 0) or np.any(gv > 1):
        raise OutOfRange("f and g must take values in [0, 1]")
    e1, v1, c1 = _moments(p1, fv, gv)
    e2, v2, c2 = _moments(p2, fv, gv)
    eta = 0.5 * math.fsum(np.abs(p1 - p2).tolist())
    return MomentGapReport(eta, abs(e1 - e2), abs(v1 - v2), abs(c1 - c2), tol)


def tv_moment_bounds_check(D1, D2, f, g, tol: float = 1e-12) -> MomentGapReport:
    """|dE[f]| <= eta, |dVar[f]| <= eta, |dCov[f,g]| <= 2 eta with eta = dtv(D1, D2).

    ``f`` and ``g`` map an outcome to [0, 1].  For labeled distributions the
    outcome is the pair ``(point, label)``.
    """
    t1, t2 = _as_table(D1), _as_table(D2)
    keys = sorted(set(t1) | set(t2))
    p1 = np.array([float(t1.get(k, 0)) for k in keys])
    p2 = np.array([float(t2.get(k, 0)) for k in keys])
    fv = np.array([float(f(k)) for k in keys])
    gv = np.array([float(g(k)) for k in keys])
    return moment_gaps(p1, p2, fv, gv, tol)


def leaf_tv_check(joint1: dict, joint2: dict) -> tuple:
    """(E_{leaf ~ joint1}[dtv of the x-conditionals], 2 dtv(joint1, joint2)).

    Joints map ``(leaf, x)`` to probability.  Leaves outside joint1's support
    contribute 0; a leaf with zero mass under joint2 uses the maximal
    conditional distance 1.
    """
    def by_leaf(joint):
        out = {}
        for (leaf, x), p in joint.items():
            out.setdefault(leaf, {})[x] = p
        return out

    l1, l2 = by_leaf(joint1), by_leaf(joint2)
    lhs = 0
    for leaf, cond1 in l1.items():
        w1 = sum(cond1.values())
        if w1 == 0:
            continue
        cond2 = l2.get(leaf, {})
        w2 = sum(cond2.values())
        if w2 == 0:
            lhs += w1
            continue
        xs = set(cond1) | set(cond2)
        dist = sum(abs(cond1.get(x, 0) / w1 - cond2.get(x, 0) / w2) for x in xs) / 2
        lhs += w1 * dist
    return lhs, 2 * tv_distance(joint1, joint2)


# ---------------------------------------------------------------------------
# weak-learning advantage
# ---------------------------------------------------------------------------

DEFAULT_ENUMERATION_CAP = 3**15


@dataclass
class AdvantageReport:
    """gamma* with its witness.

    ``ratios`` holds max_h |Cov|/Var for every induced distribution in
    enumeration order (NaN where excluded); ``keys`` names them.
    """

    gamma: float
    witness: object
    ratios: np.ndarray = field(repr=False)
    keys: list | None = field(default=None, repr=False)
    dim: int = 0

    def table(self):
        """(restriction or path, ratio) pairs for the counted induced distributions."""
        flat = self.ratios.ravel()
        for idx in np.flatnonzero(~np.isnan(flat)):
            yield self._key(int(idx)), float(flat[idx])

    def _key(self, idx: int):
        if self.keys is not None:
            return self.keys[idx]
        digits = np.unravel_index(idx, (3,) * self.dim)
        return Restriction(tuple((-1, 1, None)[int(t)] for t in digits))

    @property
    def counted(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.ratios)))


def ternary_zeta(dense: np.ndarray, dim: int) -> np.ndarray:
    """Sums over every restriction; axis j is coordinate j with digits (-1, +1, *) = (0, 1, 2)."""
    dense = np.asarray(dense, dtype=np.float64)
    # reorder so C-order reshaping puts coordinate 0 on axis 0
    arr = dense[_bit_reversal(dim)]
    pre, post = 1, 1 << dim
    for _ in range(dim):
        post //= 2
        view = arr.reshape(pre, 2, post)
        out = np.empty((pre, 3, post))
        out[:, 0] = view[:, 0]
        out[:, 1] = view[:, 1]
        np.add(view[:, 0], view[:, 1], out=out[:, 2])
        arr = out
        pre *= 3
    return arr.reshape((3,) * dim)


def _bit_reversal(dim: int) -> np.ndarray:
    idx = np.arange(1 << dim, dtype=np.int64)
    rev = np.zeros_like(idx)
    for j in range(dim):
        rev |= ((idx >> j) & 1) << (dim - 1 - j)
    return rev


def weak_learning_advantage(D: LabeledDistribution, H: HypothesisClass | None = None,
                            restrictions_only: bool | None = None, max_depth: int | None = None,
                            conditioning: HypothesisClass | None = None,
                            cap: int = DEFAULT_ENUMERATION_CAP, var_tol: float = 1e-12) -> AdvantageReport:
    """gamma* = min over induced D' with Var[y] > 0 of max_h |Cov_{D'}[h, y]| / Var_{D'}[y].

    With ``restrictions_only`` (the default for coordinate projections) the
    induced distributions are the 3^d restrictions of the cube.  Otherwise
    they are conjunctions of literals over ``conditioning`` (default ``H``)
    of at most ``max_depth`` distinct hypotheses.
    """
    if not D.is_explicit:
        raise ValueError("the advantage verifier needs an explicit distribution")
    H = HypothesisClass.projections(D.dim) if H is None else H
    if H.dim != D.dim:
        raise DimMismatch(f"hypothesis dim {H.dim} != distribution dim {D.dim}")
    if restrictions_only is None:
        restrictions_only = conditioning is None and H.is_projections
    if restrictions_only:
        return _restriction_sweep(D, H, cap, var_tol)
    return _conjunction_sweep(D, H, conditioning or H, max_depth, cap, var_tol)


def restriction_table(D: LabeledDistribution, H: HypothesisClass | None = None,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(weight, mu, max_h |Cov[h, y]|) for every restriction, each of shape (3,)*d."""
    d = D.dim
    H = HypothesisClass.projections(d) if H is None else H
    if 3**d > cap:
        raise ExplosionGuard(f"3^{d} restrictions exceed the enumeration cap {cap}")
    mass, pos = D.dense()
    W = ternary_zeta(mass, d)
    P = ternary_zeta(pos, d)
    pts = cube(d)
    best = np.zeros_like(W)
    with np.errstate(divide="ignore", invalid="ignore"):
        for h in H:
            if h.coordinate is not None:
                _projection_cov(W, P, h.coordinate, best)
                continue
            hv = h.evaluate(pts)
            Wh = ternary_zeta(mass * hv, d)
            Ph = ternary_zeta(pos * hv, d)
            cov = Ph / W - (Wh / W) * (P / W)
            cov = np.where((Wh == 0) | (Wh == W), 0.0, cov)  # h constant on the restriction
            np.maximum(best, np.abs(cov), out=best, where=W > 0)
        mu = np.where(W > 0, np.clip(P / W, 0.0, 1.0), 0.0)
    return W, mu, best


def _projection_cov(W, P, c: int, best: np.ndarray):
    """Fold |Cov[x_c, y]| into ``best``; only restrictions leaving c free can be nonzero."""
    star = [slice(None)] * W.ndim
    one = list(star)
    star[c], one[c] = 2, 1
    star, one = tuple(star), tuple(one)
    Ws, W1, Ps, P1 = W[star], W[one], P[star], P[one]
    cov = (P1 - W1 * (Ps / Ws)) / Ws
    cov = np.where((Ws > 0) & (W1 > 0) & (W1 < Ws), np.abs(cov), 0.0)
    np.maximum(best[star], cov, out=best[star])


def _restriction_sweep(D, H, cap, var_tol) -> AdvantageReport:
    W, mu, best = restriction_table(D, H, cap)
    var = mu * (1.0 - mu)
    ok = (W > 0) & (var > var_tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(ok, best / np.where(ok, var, 1.0), np.nan)
    if not ok.any():
        return AdvantageReport(1.0, None, ratios, dim=D.dim)
    flat = np.where(ok, ratios, np.inf).ravel()
    idx = int(np.argmin(flat))
    rep = AdvantageReport(float(min(flat[idx], 1.0)), None, ratios, dim=D.dim)
    rep.witness = rep._key(idx)
    return rep


def _conjunction_sweep(D, H, C, max_depth, cap, var_tol) -> AdvantageReport:
    m = len(C)
    depth = m if max_depth is None else min(max_depth, m)
    count = sum(math.comb(m, k) * 2**k for k in range(depth + 1))
    if count > cap:
        raise ExplosionGuard(f"{count} conjunctions exceed the enumeration cap {cap}")
    pts = D.points
    hmat = H.evaluate_matrix(pts).astype(np.float64)
    cmat = C.evaluate_matrix(pts)
    mass, pos = D.mass, D.positive_mass
    keys, ratios = [], []
    for k in range(depth + 1):
        for combo in itertools.combinations(range(m), k):
            for bits in itertools.product((0, 1), repeat=k):
                mask = np.ones(len(pts), dtype=bool)
                for c, b in zip(combo, bits):
                    mask &= cmat[c] == bool(b)
                keys.append(tuple(zip(combo, bits)))
                w = mass[mask].sum()
                if w <= 0:
                    ratios.append(np.nan)
                    continue
                mu = min(max(pos[mask].sum() / w, 0.0), 1.0)
                var = mu * (1 - mu)
                if var <= var_tol:
                    ratios.append(np.nan)
                    continue
                wh = hmat[:, mask] @ mass[mask]
                ph = hmat[:, mask] @ pos[mask]
                cov = np.where((wh == 0) | (wh == w), 0.0, ph / w - (wh / w) * mu)
                ratios.append(float(np.abs(cov).max() / var))
    ratios = np.array(ratios)
    if np.all(np.isnan(ratios)):
        return AdvantageReport(1.0, None, ratios, keys, D.dim)
    idx = int(np.nanargmin(ratios))
    return AdvantageReport(float(min(ratios[idx], 1.0)), keys[idx], ratios, keys, D.dim)


# ---------------------------------------------------------------------------
# influence oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleRow:
    oracle: str
    instance: str
    lhs: float
    rhs: float
    ratio: float
    passed: bool

    @staticmethod
    def csv(rows) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("oracle", "instance-id", "lhs", "rhs", "ratio", "pass"))
        for r in rows:
            w.writerow((r.oracle, r.instance, repr(float(r.lhs)), repr(float(r.rhs)), repr(float(r.ratio)),
                        "true" if r.passed else "false"))
        return buf.getvalue()


def _ratio(lhs, rhs):
    if rhs == 0:
        return math.inf if lhs > 0 else 1.0
    return lhs / rhs


def osss_oracle(tree: DecisionTree, P: ProductDistribution | None = None, instance: str = "",
                tol: float = 1e-12) -> OracleRow:
    """max_i Inf_i(f) against Var[f] / log2(s) for the function a size-s tree computes."""
    if tree.dim > 20:
        raise OutOfRange("osss_oracle enumerates the cube; d <= 20")
    f = tree.as_function()
    P = ProductDistribution.uniform(tree.dim) if P is None else P
    var = variance(f, P)
    s = tree.size
    max_inf = float(influences(f, P).max())
    if s <= 1 or var <= tol:
        return OracleRow("OSSS", instance, max_inf, 0.0, _ratio(max_inf, 0.0), True)
    rhs = var / math.log2(s)
    return OracleRow("OSSS", instance, max_inf, rhs, _ratio(max_inf, rhs), max_inf >= rhs - tol)


def kkl_oracle(f: BooleanFunction, k: int | None = None, instance: str = "") -> OracleRow:
    """max_{i<k} Inf_i(f) against (log2 k / k) Var[f] under the uniform distribution.

    The constant is not asserted; ``passed`` only reports whether the raw
    ratio reaches 1.  log2 k is clamped below at 1.
    """
    k = f.dim if k is None else k
    if not 1 <= k <= f.dim:
        raise OutOfRange(f"k must lie in [1, {f.dim}]")
    infs = influences(f)[:k]
    var = variance(f)
    rhs = max(math.log2(k), 1.0) / k * var
    max_inf = float(infs.max())
    return OracleRow("KKL", instance, max_inf, rhs, _ratio(max_inf, rhs), max_inf >= rhs)
