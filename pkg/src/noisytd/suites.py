"""Randomized brute-force suites for every identity and inequality the learner relies on.

Each suite returns a :class:`SuiteResult`; ``verify_all`` in the harness runs
them and prints a ledger keyed by lemma name.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import impurity as imp
from .adversary import build_lowerbound_instance, shift_mixture
from .analysis import (
    OracleRow,
    inf_cov_identity_check,
    kkl_oracle,
    leaf_tv_check,
    moment_gaps,
    osss_oracle,
    restriction_table,
    tv_distance,
    weak_learning_advantage,
)
from .cube import HypothesisClass, LabeledDistribution, cube
from .instances import (
    random_explicit,
    random_fraction_joint,
    random_monotone_function,
    random_pair,
    random_product,
    random_split_instance,
    random_tree,
)
from .targets import TribesSpec, random_monotone_target
from .topdown import TrainConfig, evaluate_error, progress_audit, train


@dataclass
class SuiteResult:
    lemma: str
    checks: int = 0
    failures: int = 0
    worst: float = 0.0  # largest violation (lhs - rhs style) seen
    asserted: bool = True
    rows: list = field(default_factory=list, repr=False)
    note: str = ""

    def record(self, ok: bool, slack: float = 0.0):
        self.checks += 1
        if not ok:
            self.failures += 1
        self.worst = max(self.worst, slack)

    @property
    def passed(self) -> bool:
        return self.failures == 0 or not self.asserted


def faulty_gini() -> imp.ImpurityFn:
    """G(p) = p(1-p) dressed up as Gini; used to prove the suites catch mistakes."""
    return imp.ImpurityFn("gini", 8.0, lambda p: p * (1.0 - p))


def delta_impurity(rng, n: int, gini: imp.ImpurityFn | None = None) -> SuiteResult:
    """Gini drop identity plus Delta >= 2 kappa Cov^2 for Gini, entropy and kmsqrt."""
    res = SuiteResult("delta_impurity")
    G0 = imp.gini() if gini is None else gini
    others = [imp.entropy(), imp.kmsqrt()]
    for _ in range(n):
        view, h = random_split_instance(rng)
        delta, closed = imp.gini_gain_identity_check(view, h, G0)
        res.record(abs(delta - closed) <= 1e-12, abs(delta - closed))
        for G in [G0] + others:
            chk = imp.covariance_drop_bound_check(view, h, G)
            res.record(chk.passed, chk.bound - chk.delta)
    return res


def moments_tv_dist(rng, n: int) -> SuiteResult:
    res = SuiteResult("moments_tv_dist")
    for _ in range(n):
        d = int(rng.integers(1, 7))
        p1, p2 = random_pair(d, rng)
        fv, gv = rng.random(p1.size), rng.random(p1.size)
        if rng.random() < 0.3:
            fv = np.round(fv)
        r = moment_gaps(p1, p2, fv, gv)
        res.record(r.passed, max(r.d_mean - r.eta, r.d_var - r.eta, r.d_cov - 2 * r.eta))
    # tight case: all the moved mass lands where f jumps from 0 to 1
    for eta in (0.0, 0.125, 0.3, 0.5, 0.9):
        p1 = np.array([1.0, 0.0])
        p2 = np.array([1 - eta, eta])
        r = moment_gaps(p1, p2, np.array([0.0, 1.0]), np.array([0.0, 1.0]))
        res.record(r.passed and abs(r.d_mean - eta) <= 1e-12, abs(r.d_mean - eta))
    return res


def tv_leaves(rng, n: int) -> SuiteResult:
    res = SuiteResult("TV-leaves")
    for _ in range(n):
        L, X = int(rng.integers(1, 9)), int(rng.integers(1, 17))
        j1 = random_fraction_joint(L, X, rng)
        if rng.random() < 0.3:  # same leaf conditionals, different leaf marginal
            j2 = _reweight_leaves(j1, rng)
        else:
            j2 = random_fraction_joint(L, X, rng)
        lhs, rhs = leaf_tv_check(j1, j2)
        res.record(lhs <= rhs, float(lhs - rhs))
    return res


def _reweight_leaves(joint, rng):
    from fractions import Fraction

    leaves = sorted({l for l, _ in joint})
    weights = {l: Fraction(int(rng.integers(1, 9))) for l in leaves}
    out = {k: p * weights[k[0]] for k, p in joint.items()}
    total = sum(out.values())
    return {k: p / total for k, p in out.items()}


def inf_corr(rng, n_funcs: int, n_dists: int, d: int = 4) -> SuiteResult:
    res = SuiteResult("inf-corr")
    for _ in range(n_funcs):
        f = random_monotone_function(d, rng)
        for _ in range(n_dists):
            P = random_product(d, rng)
            for inf, cov in inf_cov_identity_check(f, P):
                res.record(abs(inf - cov) <= 1e-12, abs(inf - cov))
    return res


def tribes_properties(max_k: int = 16) -> SuiteResult:
    res = SuiteResult("tribes-properties")
    for w in range(1, max_k + 1):
        for s in range(1, max_k // w + 1):
            spec = TribesSpec(w, s)
            f = spec.function()
            tt = f.truth_table
            pts = cube(spec.k)
            pf = 1.0 - tt.mean()
            res.record(abs(pf - float(spec.prob_false())) <= 1e-12, abs(pf - float(spec.prob_false())))
            signed = 2.0 * tt - 1.0
            for i in range(spec.k):
                xi = 2.0 * ((pts >> i) & 1) - 1.0
                e_signed = float(np.mean(xi * signed))
                e_ind = float(np.mean(xi * tt))
                err = max(abs(e_signed - float(spec.correlation())), abs(e_ind - float(spec.indicator_correlation())))
                res.record(err <= 1e-12, err)
    return res


def osss(rng, n: int, max_leaves: int = 64, max_dim: int = 14) -> SuiteResult:
    res = SuiteResult("OSSS")
    for j in range(n):
        d = int(rng.integers(1, max_dim + 1))
        tree = random_tree(d, max_leaves, rng)
        row = osss_oracle(tree, instance=f"tree{j}")
        res.rows.append(row)
        res.record(row.passed, row.rhs - row.lhs)
    return res


def osss_product(rng, n: int) -> SuiteResult:
    """Skewed product marginals: logged only."""
    res = SuiteResult("OSSS-product", asserted=False)
    for j in range(n):
        d = int(rng.integers(1, 9))
        tree = random_tree(d, 16, rng)
        row = osss_oracle(tree, random_product(d, rng), instance=f"tree{j}")
        row = OracleRow("OSSS-product", row.instance, row.lhs, row.rhs, row.ratio, row.passed)
        res.rows.append(row)
        res.record(row.passed, row.rhs - row.lhs)
    return res


def kkl(rng, n: int) -> SuiteResult:
    """Raw KKL ratios for Tribes and random functions; logged only."""
    res = SuiteResult("KKL", asserted=False)
    for w in range(1, 4):
        for s in range(1, 4):
            f = TribesSpec(w, s).function()
            row = kkl_oracle(f, instance=f"tribes_{w},{s}")
            res.rows.append(row)
            res.record(row.passed, row.rhs - row.lhs)
    for j in range(n):
        f = random_monotone_function(int(rng.integers(2, 7)), rng)
        row = kkl_oracle(f, instance=f"monotone{j}")
        res.rows.append(row)
        res.record(row.passed, row.rhs - row.lhs)
    return res


def lower_bound_zero_gain(d: int = 12, eps: float = 0.1) -> SuiteResult:
    res = SuiteResult("lower-bound-zero-gain")
    inst = build_lowerbound_instance(d, eps)
    r = inst.cancellation_residual()
    res.record(abs(r) <= 1e-14, abs(r))
    res.record(inst.eta <= float(inst.v), inst.eta - float(inst.v))
    res.record(inst.label_bias() >= 2 * eps - 1e-12, 2 * eps - inst.label_bias())
    view = inst.corrupted.view()
    for G in (imp.gini(), imp.entropy(), imp.kmsqrt()):
        for h in inst.hypotheses:
            g = imp.purity_gain(view, h, G).delta
            res.record(abs(g) <= 1e-12, abs(g))
    # every restriction that leaves the first k coordinates free keeps all covariances 0
    if d <= 13:
        W, mu, best = restriction_table(inst.corrupted)
        sub = best[(2,) * inst.k]
        worst = float(np.max(sub))
        res.record(worst <= 1e-12, worst)
        # and the clean leaves keep both labels with mass >= 2 eps
        Wc, muc, _ = restriction_table(inst.clean, HypothesisClass([inst.hypotheses[0]]))
        bias = np.minimum(muc, 1 - muc)[(2,) * inst.k]
        res.record(float(bias.min()) >= 2 * eps - 1e-12, 2 * eps - float(bias.min()))
    return res


def noiseless_progress(rng, n: int, d: int = 8, size: int = 8) -> SuiteResult:
    res = SuiteResult("noiseless-progress")
    for _ in range(n):
        f, _ = random_monotone_target(d, size, int(rng.integers(2**31)))
        D = LabeledDistribution.from_function(f)
        gamma = weak_learning_advantage(D).gamma
        for rec in progress_audit(D, TrainConfig(t=4 * size), gamma):
            if rec.checked:
                res.record(rec.passed, rec.bound - rec.gain)
    return res


def tv_error_transfer(rng, n: int) -> SuiteResult:
    res = SuiteResult("tv-error-transfer")
    for _ in range(n):
        d = int(rng.integers(2, 7))
        D = random_explicit(d, rng)
        E = random_explicit(d, rng, sparsity=0.5)
        Dh = shift_mixture(D, E, float(rng.random() * 0.9))
        tree, _ = train(Dh, TrainConfig(t=int(rng.integers(1, 9))))
        gap = abs(evaluate_error(tree, D) - evaluate_error(tree, Dh))
        eta = tv_distance(D, Dh)
        res.record(gap <= eta + 1e-12, gap - eta)
    return res
