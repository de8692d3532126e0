"""Config-driven experiment runner, report writer and the lemma ledger."""
from __future__ import annotations

import concurrent.futures as cf
import csv
import io
import json
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import impurity as imp
from . import suites
from .adversary import (
    build_lowerbound_instance,
    corrupt_labels_agnostic,
    corrupt_sample_nasty,
    draw_sample,
    shift_mixture,
)
from .analysis import OracleRow, ProductDistribution, weak_learning_advantage
from .cube import LabeledDistribution
from .errors import ConfigError, ExplosionGuard, InvariantFailure
from .targets import TargetSpec
from .topdown import TrainConfig, sample_size_for, train, tree_at_size

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXPERIMENTS = ("boost-noise", "lower-bound", "impurity-compare", "lemma-suite", "monotone-learn")

# key -> (default, description)
DEFAULTS: dict[str, tuple[str, str]] = {
    "experiment": ("boost-noise", "one of " + ", ".join(EXPERIMENTS)),
    "seed": ("0", "master seed; every trial derives its own streams from (seed, trial)"),
    "trials": ("1", "independent trials"),
    "dim": ("10", "cube dimension d"),
    "marginal": ("uniform", "uniform | product:p1,p2,...,pd"),
    "target": ("random-monotone-dt", "tribes | projection | majority | random-monotone-dt | read-once-dnf"),
    "target_size": ("8", "leaf bound s for random-monotone-dt"),
    "target_generator": ("rejection-sampled-tree", "read-once-dnf | rejection-sampled-tree"),
    "target_index": ("0", "coordinate of a projection target (0-based)"),
    "target_w": ("2", "Tribes term width"),
    "target_s": ("2", "Tribes term count"),
    "target_k": ("3", "majority arity"),
    "target_terms": ("", "read-once-dnf terms, 1-based, e.g. 1,2;3"),
    "target_seed": ("trial", "generator seed, or 'trial' for a per-trial seed"),
    "noise": ("none", "none | nasty | agnostic | shift"),
    "eta": ("0", "corruption budget"),
    "noise_strategy": ("random-replace", "nasty: random-replace | flip-agreeing-labels | correlation-cancel; "
                                         "agnostic: random-flip | flip-agreeing-labels"),
    "noise_k": ("0", "block width for correlation-cancel (0 means d)"),
    "shift_component": ("flip", "shift noise component: flip (labels negated) | uniform"),
    "impurity": ("gini", "gini | entropy | kmsqrt | concave:<kappa>"),
    "impurities": ("gini,entropy,kmsqrt", "impurity list for impurity-compare"),
    "t": ("64", "leaf-count bound"),
    "t_grid": ("pow2", "report sizes: pow2 (1,2,4,...,t) or a comma list"),
    "tie_break": ("lowest", "lowest | highest | random"),
    "mode": ("exact", "exact | sample"),
    "sample_size": ("auto", "sample size, or auto for the tolerance-based bound"),
    "sample_tau": ("0.45", "estimation tolerance used by sample_size=auto"),
    "confidence": ("0.9", "confidence used by sample_size=auto"),
    "eps": ("0.1", "target error"),
    "gamma": ("auto", "auto (exact verifier) | none | a number"),
    "lb_constant": ("1.0", "constant c in ell = ceil(c log2(1/gamma)/gamma)"),
    "lb_bias_factor": ("2", "Tribes bias floor in units of eps"),
    "audit": ("false", "run the per-split progress audit (exact, noiseless runs)"),
    "budget": ("60", "lemma-suite time budget in seconds"),
    "out_dir": ("out", "output directory"),
    "artifacts": ("true", "write trees and clean distributions for the round-trip audit"),
    "timing": ("false", "fill wall_time and write timing.json (breaks byte-identical output)"),
}

REPORT_COLUMNS = ("experiment", "trial", "t", "eta", "gamma", "eps", "error_clean", "error_corrupted",
                  "G_value", "wall_time")


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value, got {raw!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


class Config:
    """Flat key=value experiment configuration with typed accessors."""

    def __init__(self, values: dict[str, str] | None = None):
        values = dict(values or {})
        unknown = sorted(set(values) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        self.values = {k: d for k, (d, _) in DEFAULTS.items()}
        self.values.update(values)
        self._validate()

    @classmethod
    def load(cls, path, overrides=()) -> "Config":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values = parse_config_text(text)
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            k, v = item.split("=", 1)
            values[k.strip()] = v.strip()
        return cls(values)

    def get(self, key: str) -> str:
        return self.values[key]

    def int(self, key: str) -> int:
        try:
            return int(self.values[key])
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {self.values[key]!r}") from exc

    def float(self, key: str) -> float:
        try:
            return float(self.values[key])
        except ValueError as exc:
            raise ConfigError(f"{key} must be a number, got {self.values[key]!r}") from exc

    def bool(self, key: str) -> bool:
        v = self.values[key].lower()
        if v not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key} must be true or false, got {v!r}")
        return v in ("true", "1", "yes")

    def _validate(self):
        v = self.values
        if v["experiment"] not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {v['experiment']!r}")
        for key in ("seed", "trials", "dim", "t"):
            self.int(key)
        for key in ("eta", "eps", "sample_tau", "confidence", "lb_constant", "lb_bias_factor", "budget"):
            self.float(key)
        for key in ("audit", "artifacts", "timing"):
            self.bool(key)
        if self.int("trials") < 1 or self.int("t") < 1 or self.int("dim") < 1:
            raise ConfigError("trials, t and dim must be >= 1")
        if not 0 <= self.float("eta") < 1:
            raise ConfigError("eta must lie in [0, 1)")
        if v["noise"] not in ("none", "nasty", "agnostic", "shift"):
            raise ConfigError(f"unknown noise model {v['noise']!r}")
        if v["mode"] not in ("exact", "sample"):
            raise ConfigError(f"mode must be exact or sample, got {v['mode']!r}")
        if v["mode"] == "exact" and v["noise"] in ("nasty", "agnostic") and v["experiment"] != "lower-bound":
            raise ConfigError(f"{v['noise']} noise edits a sample; use mode=sample")
        if v["tie_break"] not in ("lowest", "highest", "random"):
            raise ConfigError(f"tie_break must be lowest, highest or random, got {v['tie_break']!r}")
        if v["shift_component"] not in ("flip", "uniform"):
            raise ConfigError("shift_component must be flip or uniform")
        try:
            imp.from_id(v["impurity"])
            for name in v["impurities"].split(","):
                imp.from_id(name)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        self.t_grid()

    def t_grid(self) -> list[int]:
        t = self.int("t")
        spec = self.values["t_grid"]
        if spec == "pow2":
            grid, s = [], 1
            while s < t:
                grid.append(s)
                s *= 2
            return grid + [t]
        try:
            grid = sorted({int(x) for x in spec.split(",") if x.strip()})
        except ValueError as exc:
            raise ConfigError(f"bad t_grid {spec!r}") from exc
        if not grid or grid[0] < 1 or grid[-1] > t:
            raise ConfigError("t_grid entries must lie in [1, t]")
        return grid

    def as_dict(self) -> dict[str, str]:
        return dict(sorted(self.values.items()))


def describe_config() -> str:
    width = max(len(k) for k in DEFAULTS)
    return "\n".join(f"{k.ljust(width)}  = {d:<24} # {doc}" for k, (d, doc) in DEFAULTS.items())


# ---------------------------------------------------------------------------
# report rows
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    experiment: str
    trial: int
    t: int
    eta: float
    gamma: float | None
    eps: float
    error_clean: float
    error_corrupted: float
    G_value: float
    wall_time: float | None = None

    def cells(self) -> list[str]:
        def num(x):
            return "" if x is None else repr(float(x))

        return [self.experiment, str(self.trial), str(self.t), num(self.eta), num(self.gamma), num(self.eps),
                num(self.error_clean), num(self.error_corrupted), num(self.G_value), num(self.wall_time)]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in sorted(rows, key=lambda r: (r.experiment, r.trial, r.t)):
        w.writerow(r.cells())
    return buf.getvalue()


def read_report(path) -> list[ReportRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            def num(k):
                return None if rec[k] == "" else float(rec[k])

            rows.append(ReportRow(rec["experiment"], int(rec["trial"]), int(rec["t"]), num("eta"), num("gamma"),
                                  num("eps"), num("error_clean"), num("error_corrupted"), num("G_value"),
                                  num("wall_time")))
    return rows


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------


@dataclass
class TrialResult:
    trial: int
    rows: list
    info: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)  # relative path -> text
    failures: list = field(default_factory=list)
    seconds: float = 0.0


def _trial_seeds(seed: int, trial: int) -> dict[str, int]:
    state = np.random.SeedSequence([seed, trial]).generate_state(4)
    return dict(zip(("target", "sample", "noise", "tie"), (int(x) for x in state)))


def _marginal(cfg: Config, d: int):
    spec = cfg.get("marginal")
    if spec == "uniform":
        return None
    if spec.startswith("product:"):
        try:
            p = [float(x) for x in spec[len("product:"):].split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad product marginal {spec!r}") from exc
        if len(p) != d:
            raise ConfigError(f"product marginal has {len(p)} entries, dim is {d}")
        return ProductDistribution(p).marginal()
    raise ConfigError(f"unknown marginal {spec!r}")


def _target_spec(cfg: Config, seeds) -> TargetSpec:
    values = {k: v for k, v in cfg.values.items() if k.startswith("target")}
    if values["target_seed"] == "trial":
        values["target_seed"] = str(seeds["target"] % 2**31)
    try:
        return TargetSpec.from_config(values)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad target spec: {exc}") from exc


def _gamma(cfg: Config, D: LabeledDistribution) -> float | None:
    g = cfg.get("gamma")
    if g == "none":
        return None
    if g != "auto":
        return cfg.float("gamma")
    try:
        return weak_learning_advantage(D).gamma
    except ExplosionGuard:
        log.warning("gamma=auto skipped: restriction sweep too large for d=%d", D.dim)
        return None


def _shift_component(D: LabeledDistribution, kind: str) -> LabeledDistribution:
    if kind == "flip":
        return LabeledDistribution(D.dim, D.points, D.mass, 1.0 - D.rate, D.mode)
    size = 1 << D.dim
    return LabeledDistribution.from_arrays(D.dim, np.arange(size), np.full(size, 1.0 / size), np.full(size, 0.5))


def _training_distribution(cfg: Config, D: LabeledDistribution, t: int, seeds, info: dict) -> LabeledDistribution:
    noise, eta = cfg.get("noise"), cfg.float("eta")
    if noise == "shift" and eta > 0:
        D_train = shift_mixture(D, _shift_component(D, cfg.get("shift_component")), eta)
    else:
        D_train = D
    if cfg.get("mode") == "exact":
        return D_train
    if cfg.get("sample_size") == "auto":
        n = sample_size_for(cfg.float("sample_tau"), t, D.dim, cfg.float("confidence"))
    else:
        n = cfg.int("sample_size")
    info["sample_size"] = n
    sample = draw_sample(D_train, n, seeds["sample"])
    if noise == "nasty":
        k = cfg.int("noise_k") or None
        sample, plan = corrupt_sample_nasty(sample, eta, cfg.get("noise_strategy"), seeds["noise"], k=k)
        info["edits"] = plan.edit_count
    elif noise == "agnostic":
        sample, plan = corrupt_labels_agnostic(sample, eta, cfg.get("noise_strategy"), seeds["noise"])
        info["edits"] = plan.edit_count
    return sample


def _learn_rows(label: str, trial: int, D_train, D_clean, G, cfg: Config, seeds, gamma, eta, res: TrialResult,
                prefix: str):
    t = cfg.int("t")
    tcfg = TrainConfig(t=t, impurity=G, tie_break=cfg.get("tie_break"), seed=seeds["tie"] % 2**31)
    tree, trace = train(D_train, tcfg, monitors=[D_clean])
    errs, gvals, clean = trace.errors_by_size(), trace.g_by_size(), trace.monitor_by_size(0)
    final = tree.size
    for size in cfg.t_grid():
        s = min(size, final)
        res.rows.append(ReportRow(label, trial, size, eta, gamma, cfg.float("eps"), clean[s], errs[s], gvals[s]))
        if cfg.bool("artifacts"):
            res.artifacts[f"trees/{prefix}_t{size}.tree"] = tree_at_size(D_train, tree.hypotheses, trace, s, G).to_text()
    res.info[f"{prefix}_final_size"] = final
    res.info[f"{prefix}_scan_cost"] = [s.scan_cost for s in trace.steps]
    return tree, trace


def _run_learning(cfg: Config, trial: int) -> TrialResult:
    seeds = _trial_seeds(cfg.int("seed"), trial)
    res = TrialResult(trial, [])
    d = cfg.int("dim")
    f, _ = _target_spec(cfg, seeds).build(d)
    D = LabeledDistribution.from_function(f, _marginal(cfg, d))
    gamma = _gamma(cfg, D)
    res.info["target"] = f.name
    res.info["gamma"] = gamma
    if cfg.bool("artifacts"):
        res.artifacts[f"dists/trial{trial}_clean.dist"] = D.to_text()
    exp = cfg.get("experiment")
    D_train = _training_distribution(cfg, D, cfg.int("t"), seeds, res.info)
    eta = cfg.float("eta") if cfg.get("noise") != "none" else 0.0
    impurities = cfg.get("impurities").split(",") if exp == "impurity-compare" else [cfg.get("impurity")]
    for name in impurities:
        G = imp.from_id(name)
        label = f"{exp}:{G.id}" if exp == "impurity-compare" else exp
        prefix = f"trial{trial}" + (f"_{G.id.replace(':', '')}" if exp == "impurity-compare" else "")
        _learn_rows(label, trial, D_train, D, G, cfg, seeds, gamma, eta, res, prefix)
        if cfg.bool("audit"):
            _audit(cfg, D_train, G, gamma, eta, res, prefix)
    return res


def _audit(cfg, D_train, G, gamma, eta, res: TrialResult, prefix: str):
    from .topdown import progress_audit

    if gamma is None or gamma <= 0 or not D_train.is_explicit or G.kappa is None:
        res.info[f"{prefix}_audit"] = "skipped"
        return
    recs = progress_audit(D_train, TrainConfig(t=cfg.int("t"), impurity=G, tie_break=cfg.get("tie_break")),
                          gamma, eta)
    bad = [r for r in recs if not r.passed]
    res.info[f"{prefix}_audit"] = {"checked": sum(r.checked for r in recs), "violations": len(bad)}
    for r in bad:
        res.failures.append(f"{prefix}: progress audit violated at iter {r.iter} (gain {r.gain!r} < {r.bound!r})")


def _run_lower_bound(cfg: Config, trial: int) -> TrialResult:
    seeds = _trial_seeds(cfg.int("seed"), trial)
    res = TrialResult(trial, [])
    d, eps = cfg.int("dim"), cfg.float("eps")
    gamma = None if cfg.get("gamma") in ("auto", "none") else cfg.float("gamma")
    bias = cfg.float("lb_bias_factor")
    inst = build_lowerbound_instance(d, eps, gamma, cfg.float("lb_constant"), bias)
    res.info.update(w=inst.w, s=inst.s, k=inst.k, ell=inst.ell, v=str(inst.v), eta=str(inst.eta_exact),
                    gamma=inst.gamma, residual=inst.cancellation_residual(),
                    max_abs_cov=float(np.max(np.abs(inst.covariances()))))
    if abs(inst.cancellation_residual()) > 1e-14:
        res.failures.append("(1 - eta) v - eta != 0")
    view = inst.corrupted.view()
    for G in (imp.gini(), imp.entropy(), imp.kmsqrt()):
        worst = max(abs(imp.purity_gain(view, h, G).delta) for h in inst.hypotheses)
        res.info[f"max_root_gain_{G.id}"] = worst
        if worst > 1e-12:
            res.failures.append(f"nonzero root gain {worst!r} for {G.id}")
    if cfg.bool("artifacts"):
        res.artifacts[f"dists/trial{trial}_clean.dist"] = inst.clean.to_text()
    G = imp.from_id(cfg.get("impurity"))
    _learn_rows("lower-bound", trial, inst.corrupted, inst.clean, G, cfg, seeds, inst.gamma, inst.eta, res,
                f"trial{trial}")
    if cfg.get("tie_break") == "highest":
        limit = 1 << (d - inst.k)
        for row in res.rows:
            if row.t <= limit and row.error_clean < bias * eps - 1e-9:
                res.failures.append(f"clean error {row.error_clean!r} < {bias * eps} at t={row.t}")
    return res


def run_trial(cfg_values: dict, trial: int) -> TrialResult:
    cfg = Config(cfg_values)
    start = time.perf_counter()
    if cfg.get("experiment") == "lower-bound":
        res = _run_lower_bound(cfg, trial)
    else:
        res = _run_learning(cfg, trial)
    res.seconds = time.perf_counter() - start
    if cfg.bool("timing"):
        for r in res.rows:
            r.wall_time = round(res.seconds, 3)
    return res


def worker_count() -> int:
    raw = os.environ.get("NOISYTD_THREADS", "")
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError as exc:
        raise ConfigError(f"NOISYTD_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def _run_trials(cfg: Config) -> list[TrialResult]:
    trials = cfg.int("trials")
    workers = min(worker_count(), trials)
    if workers == 1:
        return [run_trial(cfg.values, k) for k in range(trials)]
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_trial, cfg.values, k) for k in range(trials)]
        return [fut.result() for fut in futures]


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


@dataclass
class RunOutcome:
    rows: list
    summary: dict
    out_dir: Path
    failures: list


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def run(cfg: Config, out_dir=None) -> RunOutcome:
    """Run an experiment, write report.csv and summary.json, and return the outcome.

    Invariant violations are collected and reported in the summary; the
    caller decides whether to raise (the CLI exits with status 2).
    """
    out = Path(out_dir or cfg.get("out_dir"))
    exp = cfg.get("experiment")
    if exp == "lemma-suite":
        ledger = verify_all(cfg.int("seed"), cfg.float("budget"))
        summary = {"schema": SCHEMA_VERSION, "experiment": exp, "config": cfg.as_dict(),
                   "ledger": ledger.as_dict(), "failures": ledger.failure_lines()}
        _write(out / "report.csv", rows_to_csv([]))
        _write(out / "oracles.csv", OracleRow.csv(ledger.oracle_rows()))
        _write(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        return RunOutcome([], summary, out, ledger.failure_lines())

    results = _run_trials(cfg)
    rows = [r for res in results for r in res.rows]
    failures = [f"trial {res.trial}: {msg}" for res in results for msg in res.failures]
    eps = cfg.float("eps")
    finals = {}
    for res in results:
        for r in res.rows:
            if r.t == cfg.int("t"):
                finals.setdefault(r.experiment, []).append(r.error_clean)
    summary = {
        "schema": SCHEMA_VERSION,
        "experiment": exp,
        "config": cfg.as_dict(),
        "rows": len(rows),
        "trials": [dict(trial=res.trial, **{k: v for k, v in sorted(res.info.items())}) for res in results],
        "final_error_clean": finals,
        "success_rate": {k: sum(e <= eps for e in v) / len(v) for k, v in finals.items()},
        "failures": failures,
    }
    _write(out / "report.csv", rows_to_csv(rows))
    _write(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True, default=_json_default) + "\n")
    for res in results:
        for rel, text in sorted(res.artifacts.items()):
            _write(out / rel, text)
    if cfg.bool("timing"):
        timing = {"trials": [{"trial": res.trial, "seconds": res.seconds} for res in results]}
        _write(out / "timing.json", json.dumps(timing, indent=2) + "\n")
    return RunOutcome(rows, summary, out, failures)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def audit_round_trip(out_dir, tol: float = 1e-12) -> list[str]:
    """Recompute every error_clean from the written tree and distribution files."""
    from .cube import DecisionTree
    from .topdown import evaluate_error

    out = Path(out_dir)
    problems = []
    for row in read_report(out / "report.csv"):
        prefix = f"trial{row.trial}"
        if ":" in row.experiment:
            prefix += "_" + row.experiment.split(":", 1)[1].replace(":", "")
        tree_path = out / "trees" / f"{prefix}_t{row.t}.tree"
        dist_path = out / "dists" / f"trial{row.trial}_clean.dist"
        if not tree_path.exists() or not dist_path.exists():
            problems.append(f"missing artifacts for {row.experiment} trial {row.trial} t={row.t}")
            continue
        tree = DecisionTree.from_text(tree_path.read_text())
        dist = LabeledDistribution.from_text(dist_path.read_text())
        err = evaluate_error(tree, dist)
        if abs(err - row.error_clean) > tol:
            problems.append(f"{row.experiment} trial {row.trial} t={row.t}: {err!r} != {row.error_clean!r}")
    return problems


# ---------------------------------------------------------------------------
# lemma ledger
# ---------------------------------------------------------------------------


@dataclass
class Ledger:
    results: list = field(default_factory=list)
    seed: int = 0

    @property
    def failed(self) -> bool:
        return any(not r.passed for r in self.results)

    def failure_lines(self) -> list[str]:
        return [f"{r.lemma}: {r.failures} of {r.checks} checks failed" for r in self.results if not r.passed]

    def oracle_rows(self) -> list:
        return [row for r in self.results for row in r.rows]

    def as_dict(self) -> dict:
        return {r.lemma: {"checks": r.checks, "failures": r.failures, "asserted": r.asserted,
                          "worst_violation": r.worst} for r in self.results}

    def render(self) -> str:
        width = max(len(r.lemma) for r in self.results)
        lines = [f"{'lemma'.ljust(width)}  {'checks':>7}  {'failures':>8}  status"]
        for r in self.results:
            status = ("PASS" if r.failures == 0 else "FAIL") if r.asserted else "LOGGED"
            lines.append(f"{r.lemma.ljust(width)}  {r.checks:>7}  {r.failures:>8}  {status}")
        return "\n".join(lines)

    def raise_on_failure(self):
        if self.failed:
            raise InvariantFailure("; ".join(self.failure_lines()))


DEFAULT_BUDGET = 60.0


def verify_all(seed: int = 0, budget: float = DEFAULT_BUDGET, inject_fault: str | None = None) -> Ledger:
    """Run every lemma suite; instance counts scale with ``budget`` (seconds, 60 = full size)."""
    if inject_fault not in (None, "corrupt-gini"):
        raise ConfigError(f"unknown fault {inject_fault!r}")
    scale = max(0.01, min(1.0, budget / DEFAULT_BUDGET))

    def n(full):
        return max(1, int(round(full * scale)))

    rng = np.random.default_rng(seed)
    streams = rng.spawn(9)
    gini = suites.faulty_gini() if inject_fault == "corrupt-gini" else None
    ledger = Ledger(seed=seed)
    ledger.results.append(suites.delta_impurity(streams[0], n(10000), gini))
    ledger.results.append(suites.moments_tv_dist(streams[1], n(10000)))
    ledger.results.append(suites.tv_leaves(streams[2], n(1000)))
    ledger.results.append(suites.inf_corr(streams[3], n(100), 20))
    ledger.results.append(suites.tribes_properties(16 if scale >= 0.5 else 12))
    ledger.results.append(suites.osss(streams[4], n(500)))
    ledger.results.append(suites.lower_bound_zero_gain())
    ledger.results.append(suites.noiseless_progress(streams[5], n(50)))
    ledger.results.append(suites.tv_error_transfer(streams[6], n(100)))
    ledger.results.append(suites.osss_product(streams[7], n(50)))
    ledger.results.append(suites.kkl(streams[8], n(20)))
    return ledger
