import json
import re

import pytest

from noisytd import harness
from noisytd.cli import main
from noisytd.errors import ConfigError, EmptyReport
from noisytd.plots import emit_plots, padded_range, render_svg, series_by_eta


def write_cfg(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


SMALL_BOOST = """\
experiment = boost-noise
seed = 5
trials = 3
dim = 6
target = random-monotone-dt
target_size = 4
noise = nasty
eta = 0.02
noise_strategy = random-replace
t = 16
mode = sample
sample_size = 20000
"""


class TestConfig:
    def test_defaults_and_overrides(self, tmp_path):
        path = write_cfg(tmp_path, "dim = 5\n# comment\nt = 8  # trailing\n")
        cfg = harness.Config.load(path, ["seed=9"])
        assert cfg.int("dim") == 5 and cfg.int("t") == 8 and cfg.int("seed") == 9
        assert cfg.get("impurity") == "gini"
        assert cfg.t_grid() == [1, 2, 4, 8]

    def test_custom_grid(self):
        cfg = harness.Config({"t": "10", "t_grid": "3,1,10"})
        assert cfg.t_grid() == [1, 3, 10]

    @pytest.mark.parametrize("values", [
        {"colour": "red"},
        {"experiment": "boosting"},
        {"eta": "1.5"},
        {"trials": "0"},
        {"noise": "nasty", "mode": "exact"},
        {"impurity": "misclassification"},
        {"t": "4", "t_grid": "1,8"},
        {"audit": "maybe"},
    ])
    def test_rejects(self, values):
        with pytest.raises(ConfigError):
            harness.Config(values)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            harness.Config.load(tmp_path / "nope.cfg")

    def test_describe_lists_every_key(self):
        text = harness.describe_config()
        for key in harness.DEFAULTS:
            assert re.search(rf"^{key}\s", text, re.M)


class TestReport:
    def test_csv_roundtrip(self, tmp_path):
        rows = [harness.ReportRow("e", 1, 4, 0.1, None, 0.1, 0.25, 0.3, 0.5),
                harness.ReportRow("e", 0, 2, 0.1, 0.5, 0.1, 0.125, 0.2, 0.75)]
        text = harness.rows_to_csv(rows)
        assert text.splitlines()[0] == ",".join(harness.REPORT_COLUMNS)
        assert text.splitlines()[1].startswith("e,0,2,")
        path = tmp_path / "r.csv"
        path.write_text(text)
        back = harness.read_report(path)
        assert back[1].gamma is None and back[1].wall_time is None
        assert back[0].error_clean == 0.125

    def test_trial_seeds_are_stable(self):
        assert harness._trial_seeds(1, 2) == harness._trial_seeds(1, 2)
        assert harness._trial_seeds(1, 2) != harness._trial_seeds(1, 3)


class TestRuns:
    def test_boost_small(self, tmp_path):
        cfg = harness.Config(harness.parse_config_text(SMALL_BOOST))
        out = harness.run(cfg, tmp_path / "out")
        assert not out.failures
        assert len(out.rows) == 3 * len(cfg.t_grid())
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["schema"] == 1
        assert all(t["edits"] == 400 for t in summary["trials"])
        assert harness.audit_round_trip(tmp_path / "out") == []

    def test_worker_count_does_not_change_output(self, tmp_path, monkeypatch):
        cfg = harness.Config(harness.parse_config_text(SMALL_BOOST))
        monkeypatch.setenv("NOISYTD_THREADS", "1")
        harness.run(cfg, tmp_path / "a")
        monkeypatch.setenv("NOISYTD_THREADS", "3")
        harness.run(cfg, tmp_path / "b")
        for name in ("report.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_noiseless_projection_reaches_zero_at_two(self, tmp_path):
        cfg = harness.Config({"target": "projection", "dim": "4", "t": "4", "gamma": "none"})
        rows = {r.t: r for r in harness.run(cfg, tmp_path).rows}
        assert rows[1].error_clean == 0.5
        assert rows[2].error_clean == 0.0

    def test_monotone_learn_with_audit(self, tmp_path):
        cfg = harness.Config({"experiment": "monotone-learn", "dim": "8", "t": "16", "trials": "2",
                              "audit": "true"})
        out = harness.run(cfg, tmp_path)
        assert not out.failures
        for t in out.summary["trials"]:
            assert t["trial0_audit" if t["trial"] == 0 else "trial1_audit"]["violations"] == 0

    def test_impurity_compare_labels(self, tmp_path):
        cfg = harness.Config({"experiment": "impurity-compare", "dim": "6", "t": "8", "target_size": "4",
                              "impurities": "gini,concave:4"})
        out = harness.run(cfg, tmp_path)
        assert {r.experiment for r in out.rows} == {"impurity-compare:gini", "impurity-compare:concave:4"}
        assert harness.audit_round_trip(tmp_path) == []

    def test_shift_noise(self, tmp_path):
        cfg = harness.Config({"dim": "6", "t": "8", "target_size": "4", "noise": "shift", "eta": "0.1"})
        out = harness.run(cfg, tmp_path)
        # an exact mixture is within eta in TV, so every tree's two errors differ by at most eta
        assert all(abs(r.error_corrupted - r.error_clean) <= 0.1 + 1e-12 for r in out.rows)
        assert any(r.error_corrupted != r.error_clean for r in out.rows)

    def test_lower_bound_small(self, tmp_path):
        cfg = harness.Config({"experiment": "lower-bound", "dim": "8", "eps": "0.1", "t": "64",
                              "tie_break": "highest"})
        out = harness.run(cfg, tmp_path)
        assert not out.failures
        assert all(r.error_clean >= 0.2 - 1e-9 for r in out.rows)
        assert harness.audit_round_trip(tmp_path) == []

    def test_timing_sidecar(self, tmp_path):
        cfg = harness.Config({"target": "projection", "dim": "3", "t": "2", "gamma": "none", "timing": "true"})
        out = harness.run(cfg, tmp_path)
        assert (tmp_path / "timing.json").exists()
        assert all(r.wall_time is not None for r in out.rows)


class TestLedger:
    def test_small_budget_passes(self):
        ledger = harness.verify_all(seed=1, budget=2)
        assert not ledger.failed
        names = set(ledger.as_dict())
        for lemma in ("delta_impurity", "moments_tv_dist", "TV-leaves", "inf-corr", "tribes-properties",
                      "OSSS", "lower-bound-zero-gain"):
            assert lemma in names

    def test_seed_does_not_change_outcome(self):
        a = harness.verify_all(seed=2, budget=1)
        b = harness.verify_all(seed=3, budget=1)
        assert not a.failed
        assert not b.failed

    def test_fault_is_caught(self):
        ledger = harness.verify_all(seed=0, budget=1, inject_fault="corrupt-gini")
        assert ledger.failed
        assert any(line.startswith("delta_impurity") for line in ledger.failure_lines())


class TestPlots:
    def rows(self):
        R = harness.ReportRow
        return [R("e", 0, 1, 0.0, None, 0.1, 0.5, 0.5, 1.0), R("e", 0, 2, 0.0, None, 0.1, 0.25, 0.25, 0.5),
                R("e", 1, 2, 0.0, None, 0.1, 0.35, 0.25, 0.5), R("e", 0, 1, 0.1, None, 0.1, 0.4, 0.5, 1.0)]

    def test_padded_range(self):
        assert padded_range([0.0, 1.0]) == pytest.approx((-0.05, 1.05))
        assert padded_range([2.0]) == pytest.approx((1.9, 2.1))

    def test_series_mean_over_trials(self):
        s = series_by_eta(self.rows())
        assert s[0.0] == [(1, 0.5), (2, pytest.approx(0.3))]
        assert s[0.1] == [(1, 0.4)]

    def test_two_series_two_polylines(self):
        svg = render_svg("e", series_by_eta(self.rows()))
        assert svg.count("<polyline") == 2
        assert "eta=0.1" in svg and "eta=0" in svg

    def test_single_point(self):
        svg = render_svg("e", {0.0: [(4, 0.2)]})
        assert svg.count("<polyline") == 1 and svg.count("<circle") == 1

    def test_emit(self, tmp_path):
        paths = emit_plots(self.rows(), tmp_path)
        assert [p.name for p in paths] == ["e.svg"]
        assert paths[0].read_text() == render_svg("e", series_by_eta(self.rows()))
        with pytest.raises(EmptyReport):
            emit_plots([], tmp_path)


class TestCli:
    def test_run_and_plot(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "target = projection\ndim = 3\nt = 4\ngamma = none\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
        assert main(["plot", "--report", str(tmp_path / "o" / "report.csv"), "--out", str(tmp_path / "p")]) == 0
        assert (tmp_path / "p" / "boost-noise.svg").exists()

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "bogus = 1\n")
        assert main(["run", "--config", str(cfg)]) == 1
        assert "unknown config keys" in capsys.readouterr().err

    def test_verify_fault_exit(self, tmp_path, capsys):
        report = tmp_path / "oracles.csv"
        code = main(["verify-all", "--budget", "1", "--inject-fault", "corrupt-gini", "--report", str(report)])
        assert code == 2
        assert "FAIL" in capsys.readouterr().out
        assert report.read_text().startswith("oracle,instance-id,lhs,rhs,ratio,pass")

    def test_config_listing(self, capsys):
        assert main(["config"]) == 0
        assert "experiment" in capsys.readouterr().out

    def test_empty_report_plot(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(harness.rows_to_csv([]))
        assert main(["plot", "--report", str(path), "--out", str(tmp_path)]) == 1
