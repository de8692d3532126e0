"""Impurity functions and purity gain."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cube import Hypothesis, LabeledDistribution
from .errors import ConfigError, OutOfRange, ZeroWeight

LN2 = math.log(2.0)


def _gini(p):
    return 4.0 * p * (1.0 - p)


def _entropy(p):
    p = np.asarray(p, dtype=np.float64)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        b = np.where(q > 0, -q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    return a + b


def _power_gini(alpha):
    def g(p):
        return np.power(np.clip(4.0 * p * (1.0 - p), 0.0, 1.0), alpha)

    return g


@dataclass(frozen=True)
class ImpurityFn:
    """A concave impurity G: [0,1] -> [0,1] with curvature bound G'' <= -kappa.

    ``kappa`` is None when no strong-concavity constant is claimed.
    """

    kind: str
    kappa: float | None
    fn: Callable = None
    param: float | None = None

    def __call__(self, p):
        arr = np.asarray(p, dtype=np.float64)
        out = self.fn(np.clip(arr, 0.0, 1.0))
        return float(out) if arr.ndim == 0 else out

    @property
    def id(self) -> str:
        if self.kind == "concave":
            return f"concave:{self.param:g}"
        return self.kind

    def __repr__(self):
        return f"ImpurityFn({self.id!r}, kappa={self.kappa})"


def gini() -> ImpurityFn:
    return ImpurityFn("gini", 8.0, _gini)


def entropy() -> ImpurityFn:
    # -G''(p) = 1 / (ln2 p (1-p)) is smallest at p = 1/2
    return ImpurityFn("entropy", 4.0 / LN2, _entropy)


def kmsqrt() -> ImpurityFn:
    # G = 2 sqrt(p(1-p)) has G'' = -1 / (2 (p(1-p))^{3/2}) <= -4
    return ImpurityFn("kmsqrt", 4.0, _power_gini(0.5))


def custom_concave(kappa: float) -> ImpurityFn:
    """G(p) = (4p(1-p))^(kappa/8), whose curvature bound is exactly kappa."""
    if not 0 < kappa <= 8:
        raise OutOfRange(f"concave impurity needs 0 < kappa <= 8, got {kappa}")
    G = ImpurityFn("concave", float(kappa), _power_gini(kappa / 8.0), param=float(kappa))
    validate(G)
    return G


def from_id(text: str) -> ImpurityFn:
    """Parse ``gini | entropy | kmsqrt | concave:<kappa>``."""
    text = text.strip()
    if text == "gini":
        return gini()
    if text == "entropy":
        return entropy()
    if text == "kmsqrt":
        return kmsqrt()
    if text.startswith("concave:"):
        try:
            kappa = float(text.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad impurity id {text!r}") from exc
        return custom_concave(kappa)
    raise ConfigError(f"unknown impurity {text!r}; expected gini, entropy, kmsqrt or concave:<kappa>")


def validate(G: ImpurityFn, step: float = 1e-3, fd_step: float = 1e-4) -> None:
    """Check the impurity-function axioms and the stored curvature bound on a grid."""
    if abs(G(0.0)) > 1e-12 or abs(G(1.0)) > 1e-12:
        raise ValueError(f"{G.id}: G(0) and G(1) must be 0")
    if abs(G(0.5) - 1.0) > 1e-12:
        raise ValueError(f"{G.id}: G(1/2) must be 1")
    grid = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    vals = G(grid)
    if np.max(np.abs(vals - G(1.0 - grid))) > 1e-12:
        raise ValueError(f"{G.id}: not symmetric about 1/2")
    if np.any(vals < np.minimum(grid, 1.0 - grid) - 1e-12):
        raise ValueError(f"{G.id}: G(p) < min(p, 1-p) somewhere")
    if G.kappa is not None:
        inner = grid[(grid >= 10 * fd_step) & (grid <= 1 - 10 * fd_step)]
        second = (G(inner + fd_step) - 2 * G(inner) + G(inner - fd_step)) / fd_step**2
        if np.any(second > -G.kappa * (1 - 1e-4)):
            worst = inner[np.argmax(second)]
            raise ValueError(f"{G.id}: G''({worst:.3f}) exceeds -kappa={-G.kappa}")


def impurity_value(G: ImpurityFn, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"bias {p} outside [0, 1]")
    return G(p)


# ---------------------------------------------------------------------------
# purity gain
# ---------------------------------------------------------------------------


def weighted_gain(G: ImpurityFn, W, P, W1, P1):
    """Absolute-mass purity gain  W G(P/W) - W0 G(P0/W0) - W1 G(P1/W1).

    Equals w(leaf) * Delta.  Splits with an empty branch get 0.
    """
    W = np.asarray(W, dtype=np.float64)
    W1 = np.asarray(W1, dtype=np.float64)
    P1 = np.asarray(P1, dtype=np.float64)
    W0 = W - W1
    P0 = P - P1
    ok = (W1 > 0) & (W0 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        parent = np.where(W > 0, W * G(np.where(W > 0, P / np.where(W > 0, W, 1), 0)), 0.0)
        c1 = np.where(ok, W1 * G(P1 / np.where(ok, W1, 1)), 0.0)
        c0 = np.where(ok, W0 * G(P0 / np.where(ok, W0, 1)), 0.0)
    return np.where(ok, parent - c0 - c1, 0.0)


@dataclass(frozen=True)
class GainReport:
    tau: float  # Pr[h = 1] at the leaf
    mu: float
    mu0: float
    mu1: float
    delta: float  # local drop
    weight: float  # w(leaf)

    @property
    def weighted_delta(self) -> float:
        return self.weight * self.delta

    @property
    def bias_gap(self) -> float:
        """mu1 - mu0."""
        return self.mu1 - self.mu0


def _split_sums(view, h: Hypothesis):
    """(W, P, N, W1, P1, N1): total, positive and negative mass, overall and on h = 1."""
    if isinstance(view, LabeledDistribution):
        view = view.view()
    if view.degenerate:
        raise ZeroWeight("cannot split a zero-weight view")
    mass = view.base.mass[view.mask]
    rate = view.base.rate[view.mask]
    pos, neg = mass * rate, mass * (1.0 - rate)
    go = h.evaluate(view.points)
    return (view.weight, float(pos.sum()), float(neg.sum()),
            float(mass[go].sum()), float(pos[go].sum()), float(neg[go].sum()))


def _minority(P: float, N: float) -> float:
    # G is symmetric, so G(mu) = G(min(P, N) / (P + N)); the minority share
    # keeps full relative precision when mu is within rounding of 0 or 1
    total = P + N
    return min(P, N) / total if total > 0 else 0.0


def purity_gain(view, h: Hypothesis, G: ImpurityFn) -> GainReport:
    W, P, N, W1, P1, N1 = _split_sums(view, h)
    W0, P0, N0 = W - W1, P - P1, N - N1
    mu = min(max(P / W, 0.0), 1.0)
    tau = W1 / W
    if W1 <= 0 or W0 <= 0:
        # the empty branch inherits the leaf bias, so Delta = 0
        return GainReport(tau, mu, mu, mu, 0.0, W)
    mu0 = min(max(P0 / W0, 0.0), 1.0)
    mu1 = min(max(P1 / W1, 0.0), 1.0)
    delta = G(_minority(P, N)) - (1 - tau) * G(_minority(P0, N0)) - tau * G(_minority(P1, N1))
    return GainReport(tau, mu, mu0, mu1, delta, W)


def split_covariance(view, h: Hypothesis) -> float:
    """Cov[h(x), y] under the conditional distribution, computed from raw moments."""
    if isinstance(view, LabeledDistribution):
        view = view.view()
    mass = view.mass
    rate = view.rate
    hv = h.evaluate(view.points).astype(np.float64)
    e_hy = float(np.dot(mass, hv * rate))
    return e_hy - float(np.dot(mass, hv)) * float(np.dot(mass, rate))


def gini_gain_identity_check(view, h: Hypothesis, G: ImpurityFn | None = None) -> tuple[float, float]:
    """(Delta, 4 tau (1-tau) delta^2) for the Gini impurity."""
    G = gini() if G is None else G
    r = purity_gain(view, h, G)
    return r.delta, 4.0 * r.tau * (1.0 - r.tau) * r.bias_gap**2


@dataclass(frozen=True)
class DropBoundCheck:
    delta: float
    bound: float
    covariance: float
    passed: bool


def covariance_drop_bound_check(view, h: Hypothesis, G: ImpurityFn, tol: float = 1e-12) -> DropBoundCheck:
    """Delta >= 2 kappa Cov[h, y]^2 (16 Cov^2 for Gini)."""
    if G.kappa is None:
        raise ValueError(f"{G.id} has no curvature constant")
    r = purity_gain(view, h, G)
    cov = split_covariance(view, h)
    bound = 2.0 * G.kappa * cov * cov
    return DropBoundCheck(r.delta, bound, cov, r.delta >= bound - tol)
