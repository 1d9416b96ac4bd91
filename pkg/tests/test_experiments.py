import csv
import json

import pytest

import expanderlab as xl
from expanderlab.experiments import canonical_report_json, check, metric


def cfg_base(experiment, seed=5, **extra):
    cfg = {"version": 1, "experiment": experiment, "seed": seed}
    cfg.update(extra)
    return cfg


class TestConfigValidation:
    def test_version_required(self):
        with pytest.raises(xl.ConfigError, match="version"):
            xl.run_experiment({"experiment": "wrapup", "seed": 1})

    def test_unknown_experiment(self):
        with pytest.raises(xl.ConfigError, match="unknown"):
            xl.run_experiment(cfg_base("nope"))

    def test_seed_mandatory(self):
        with pytest.raises(xl.ConfigError, match="seed"):
            xl.run_experiment({"version": 1, "experiment": "wrapup"})

    def test_thresholds_must_be_declared(self):
        with pytest.raises(xl.ConfigError, match="threshold"):
            xl.run_experiment(cfg_base("wrapup", inputs={"alpha": 0.3,
                                                         "completeness_min": 1.0}))

    def test_config_file_errors(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(xl.ConfigError, match="JSON"):
            xl.load_config(path)


class TestWrapup:
    def test_synthetic_inputs_all_pass(self):
        report = xl.run_experiment(cfg_base(
            "wrapup",
            inputs={"alpha": 0.25, "completeness_min": 1.0},
            thresholds={"target_completeness": 0.99, "target_soundness": 0.01}))
        assert report["passed"]
        by_name = {m["name"]: m for m in report["metrics"]}
        reps = by_name["repetitions"]["value"]
        assert xl.repeated_acceptance(1 - 0.25 / 4, reps) <= 0.01

    def test_bad_synthetic_inputs_fail(self):
        report = xl.run_experiment(cfg_base(
            "wrapup",
            inputs={"alpha": 0.25, "completeness_min": 0.9},
            thresholds={"target_completeness": 0.99, "target_soundness": 0.01}))
        assert not report["passed"]


class TestSmallRuns:
    def test_sunflower_pipeline(self):
        report = xl.run_experiment(cfg_base(
            "sunflower-pipeline", n=10, zeta=2, q=2, n_trials=40,
            thresholds={"min_fraction_ok": 1.0}))
        assert report["passed"]

    def test_adversary_tiny(self):
        report = xl.run_experiment(cfg_base(
            "adversary-tiny", thresholds={"identity_tolerance": 1e-12}))
        assert report["passed"]
        by_name = {m["name"]: m for m in report["metrics"]}
        assert by_name["l_max"]["value"] == 8
        assert by_name["l_max_forward_vs_analytic"]["value"] == 4

    def test_concentration_small(self):
        report = xl.run_experiment(cfg_base(
            "concentration", n_samples=80,
            params={"n": 64, "d": 8, "ell": 4, "gamma": 0.25},
            pinned=[0, 1], thresholds={"min_fraction": 0.5}))
        names = [m["name"] for m in report["metrics"]]
        assert "fraction_good" in names and "abort_rate" in names

    def test_walk_abort_small(self):
        report = xl.run_experiment(cfg_base(
            "walk-abort", n_trials=300, control_trials=50,
            params={"n": 64, "d": 8, "ell": 1, "gamma": 0.25},
            thresholds={"sigma_allowance": 3.0}))
        assert report["passed"]
        assert report["total_queries"] > 0

    def test_qma_completeness_small(self):
        report = xl.run_experiment(cfg_base(
            "qma-completeness", n_samples=5, n_cover_samples=5,
            params={"n": 64, "d": 8, "ell": 4, "gamma": 0.25},
            thresholds={"tolerance": 1e-10, "subset_floor_slack": 1e-9}))
        assert report["passed"]
        # two oracle queries per verifier run
        by_name = {m["name"]: m for m in report["metrics"]}
        runs = by_name["components_checked"]["value"] + 5
        assert report["total_queries"] == 2 * runs


class TestReproducibility:
    def test_reports_byte_identical(self):
        cfg = cfg_base("concentration", n_samples=50,
                       params={"n": 64, "d": 8, "ell": 4, "gamma": 0.25},
                       pinned=[0, 1], thresholds={"min_fraction": 0.2})
        a = canonical_report_json(xl.run_experiment(cfg))
        b = canonical_report_json(xl.run_experiment(cfg))
        assert a == b

    def test_timing_excluded_from_canonical_form(self):
        cfg = cfg_base("wrapup", inputs={"alpha": 0.3, "completeness_min": 1.0},
                       thresholds={"target_completeness": 0.99,
                                   "target_soundness": 0.01})
        report = xl.run_experiment(cfg)
        assert "wall_clock_s" in report["timing"]
        assert "timing" not in json.loads(canonical_report_json(report))


class TestReportFiles:
    def test_write_report_and_tables(self, tmp_path):
        cfg = cfg_base("wrapup", inputs={"alpha": 0.3, "completeness_min": 1.0},
                       thresholds={"target_completeness": 0.99,
                                   "target_soundness": 0.01},
                       output_dir=str(tmp_path))
        report = xl.run_experiment(cfg)
        json_path, csv_path = xl.write_report(report)
        loaded = json.loads(open(json_path).read())
        assert loaded["experiment"] == "wrapup"
        rows = list(csv.reader(open(csv_path)))
        assert rows[0][:3] == ["experiment", "metric", "claim"]
        assert len(rows) == len(report["metrics"]) + 1

    def test_empty_report_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        xl.emit_plot_tables({"experiment": "none", "metrics": []}, path)
        rows = list(csv.reader(open(path)))
        assert len(rows) == 1

    def test_metric_helpers(self):
        m = metric("a", "claim", 1.0)
        assert m["passed"] is None
        assert check("a", "c", 1.0, 0.5, ">=")["passed"]
        assert not check("a", "c", 1.0, 0.5, "<=")["passed"]
