"""Command-line entry point: ``noisytd run | verify-all | plot | config``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .errors import ConfigError, EmptyReport, InvariantFailure, NoisyTDError
from .plots import emit_plots


def _cmd_run(args) -> int:
    cfg = harness.Config.load(args.config, args.set)
    outcome = harness.run(cfg, args.out)
    print(f"wrote {outcome.out_dir / 'report.csv'} ({len(outcome.rows)} rows)")
    for exp, rate in sorted(outcome.summary.get("success_rate", {}).items()):
        print(f"{exp}: final clean error <= eps in {rate:.0%} of trials")
    if outcome.failures:
        for line in outcome.failures:
            print(f"INVARIANT FAILURE {line}", file=sys.stderr)
        raise InvariantFailure(f"{len(outcome.failures)} invariant failures")
    return 0


def _cmd_verify(args) -> int:
    ledger = harness.verify_all(args.seed, args.budget, args.inject_fault)
    print(ledger.render())
    if args.report:
        from .analysis import OracleRow

        with open(args.report, "w") as fh:
            fh.write(OracleRow.csv(ledger.oracle_rows()))
    ledger.raise_on_failure()
    return 0


def _cmd_plot(args) -> int:
    rows = harness.read_report(args.report)
    for path in emit_plots(rows, args.out):
        print(f"wrote {path}")
    return 0


def _cmd_config(args) -> int:
    print(harness.describe_config())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="noisytd", description="Top-down decision tree learning under adversarial noise")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a key=value config")
    r.add_argument("--config", required=True)
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    r.add_argument("--out", default=None, help="output directory (overrides out_dir)")
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("verify-all", help="run every lemma suite and print the ledger")
    v.add_argument("--budget", type=float, default=harness.DEFAULT_BUDGET, help="seconds; 60 runs full-size suites")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject-fault", choices=["corrupt-gini"], default=None)
    v.add_argument("--report", default=None, help="write oracle rows to this CSV")
    v.set_defaults(func=_cmd_verify)

    pl = sub.add_parser("plot", help="render SVG charts from a report CSV")
    pl.add_argument("--report", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=_cmd_plot)

    c = sub.add_parser("config", help="list config keys and defaults")
    c.set_defaults(func=_cmd_config)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 2
    except EmptyReport as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NoisyTDError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
