"""End-to-end command-line coverage: every subcommand, config handling, errors."""
from __future__ import annotations

import hashlib
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from demotrend import MonthKey, MonthlySeries, synthesize_pyramid
from demotrend.ingest import write_index, write_population
from demotrend.series import UNIT_INDEX

from conftest import parse_kv

M = MonthKey


def tree_bytes(root) -> dict[str, bytes]:
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = path.read_bytes()
    return out


class TestSynthCommand:
    def test_two_runs_write_identical_trees(self, run_cli, tmp_path):
        code_a, out_a, _ = run_cli("synth", "--seed", 5, "--out", tmp_path / "a")
        code_b, _, _ = run_cli("synth", "--seed", 5, "--out", tmp_path / "b")
        assert code_a == code_b == 0
        assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")
        kv = parse_kv(out_a)
        assert kv["seed"] == "5"
        assert kv["months"] == "240"
        assert kv["start"] == "1990-04"

    def test_overrides_reach_the_generator(self, run_cli, tmp_path):
        code, out, err = run_cli(
            "synth", "--seed", 8, "--months", 48, "--start", "2001-07",
            "--truth-a", 30.0, "--truth-b", -0.1, "--return-noise-sd", 0.0,
            "--out", tmp_path,
        )
        assert code == 0 and err == ""
        kv = parse_kv(out)
        assert kv["months"] == "48"
        assert kv["start"] == "2001-07"
        assert kv["truth_a"] == "30"
        text = (tmp_path / "truth.txt").read_text()
        assert "a = 30.0" in text and "b = -0.1" in text

    def test_seed_is_required(self, run_cli, tmp_path):
        code, _, err = run_cli("synth", "--out", tmp_path)
        assert code == 1
        assert err.startswith("demotrend: error:")
        assert "seed" in err

    def test_golden_seed_42_checksums(self, run_cli, tmp_path):
        # Frozen digests guard the whole deterministic pipeline: RNG stream,
        # inversion arithmetic, repr-based file formatting.
        code, _, _ = run_cli("synth", "--seed", 42, "--out", tmp_path)
        assert code == 0
        expected = {
            "population.csv": "9a0588106ff7d89253c585e420411975793d2c567a95fa252205534a425f68a6",
            "index.csv": "ce83cc1db2ed614c324912351d34dcb97ebe38fd8c921a04fa0e615d535681d8",
            "gdp.csv": "bf788a5de4f2de696f8b0a53b96e6aea866b72129397f069d243e22a52a78706",
            "truth.txt": "8f813179ad8eab93778b36d03088738e62a9ad2b90c72bc6d21b8d87f44edc29",
        }
        for name, digest in expected.items():
            assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest, name


class TestFitCommand:
    def test_noiseless_ols_recovers_truth(self, run_cli, noiseless_files, tmp_path):
        code, out, err = run_cli(
            "fit", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"], "--method", "ols", "--out", tmp_path,
        )
        assert code == 0 and err == ""
        kv = parse_kv(out)
        assert abs(float(kv["a"]) - 170.0) <= 1e-6
        assert abs(float(kv["b"]) + 0.04) <= 1e-9
        assert float(kv["rms"]) <= 1e-9
        assert kv["method"] == "ols"
        assert (tmp_path / "tables" / "fit_summary.csv").is_file()
        assert (tmp_path / "series" / "predicted_returns.csv").is_file()

    def test_preset_evaluates_fixed_coefficients(self, run_cli, noiseless_files, tmp_path):
        code, out, _ = run_cli(
            "fit", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--preset", "postcensal-1990s", "--out", tmp_path,
        )
        assert code == 0
        kv = parse_kv(out)
        assert kv["a"] == "170"
        assert kv["b"] == "-0.04"
        assert kv["method"] == "preset"
        # fixture truth matches the preset, so the evaluation is exact
        assert float(kv["rms"]) <= 1e-9

    def test_plots_are_rendered_unless_disabled(self, run_cli, noisy_files, tmp_path):
        code, out, _ = run_cli(
            "fit", "--population", noisy_files["population"],
            "--index", noisy_files["index"], "--out", tmp_path / "with",
        )
        assert code == 0
        svgs = sorted(p.name for p in (tmp_path / "with" / "plots").glob("*.svg"))
        assert svgs == ["cumulative_comparison.svg", "residuals.svg", "returns_comparison.svg"]
        ET.fromstring((tmp_path / "with" / "plots" / "residuals.svg").read_text())

        code, out, _ = run_cli(
            "fit", "--population", noisy_files["population"],
            "--index", noisy_files["index"], "--no-plots", "--out", tmp_path / "without",
        )
        assert code == 0
        assert not (tmp_path / "without" / "plots").exists()

    def test_gdp_route_without_population(self, run_cli, noisy_files, tmp_path):
        code, out, _ = run_cli(
            "fit", "--gdp", noisy_files["gdp"], "--index", noisy_files["index"],
            "--out", tmp_path,
        )
        assert code == 0
        kv = parse_kv(out)
        assert kv["predictor"] == "two-quarter mean gdp growth"
        assert kv["method"] == "ols"

    def test_gdp_preset_uses_its_coefficients(self, run_cli, noisy_files, tmp_path):
        code, out, _ = run_cli(
            "fit", "--preset", "gdp", "--gdp", noisy_files["gdp"],
            "--index", noisy_files["index"], "--out", tmp_path,
        )
        assert code == 0
        kv = parse_kv(out)
        assert kv["a"] == "10"
        assert kv["b"] == "-0.25"
        assert kv["method"] == "preset"
        assert kv["predictor"] == "two-quarter mean gdp growth"

    def test_missing_index_is_an_error(self, run_cli, noiseless_files, tmp_path):
        code, out, err = run_cli(
            "fit", "--population", noiseless_files["population"], "--out", tmp_path,
        )
        assert code == 1
        assert err.startswith("demotrend: error:")
        assert "--index" in err

    def test_missing_file_is_reported(self, run_cli, tmp_path):
        code, _, err = run_cli(
            "fit", "--population", tmp_path / "nope.csv",
            "--index", tmp_path / "nope2.csv", "--out", tmp_path,
        )
        assert code == 1
        assert "cannot read" in err


@pytest.fixture(scope="module")
def growth_files(tmp_path_factory):
    """Pure exponential pyramid and constant-return index over one span."""
    root = tmp_path_factory.mktemp("growth")
    start, months, g = M(1990, 1), 180, 0.003
    pyramid = synthesize_pyramid(0, start, months, range(3, 12), 2.0e5, g, 0.0)
    write_population(pyramid, root / "pop.csv")
    prices = MonthlySeries(start, 1000.0 * 1.004 ** np.arange(months), UNIT_INDEX)
    write_index(prices, "close", root / "idx.csv")
    return {"population": root / "pop.csv", "index": root / "idx.csv", "growth": g}


class TestForecastCommand:
    def test_unshifted_proxy_is_rejected(self, run_cli, noiseless_files, tmp_path):
        code, _, err = run_cli(
            "forecast", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"], "--out", tmp_path,
        )
        assert code == 1
        assert "not a forecast" in err

    def test_shifted_preset_extends_closed_form(self, run_cli, growth_files, tmp_path):
        # Exponential counts make the change rate exactly g everywhere, so
        # every forecast month must equal a*g + b for the preset pair.
        code, out, err = run_cli(
            "forecast", "--population", growth_files["population"],
            "--index", growth_files["index"],
            "--preset", "7yo-horizon", "--out", tmp_path,
        )
        assert code == 0 and err == ""
        kv = parse_kv(out)
        assert kv["horizon_months"] == "24"
        assert kv["forecast_start"] == "2005-01"
        assert kv["forecast_end"] == "2006-12"
        expected = 165.0 * growth_files["growth"] - 0.061
        rows = (tmp_path / "series" / "forecast.csv").read_text().splitlines()
        assert rows[0] == "month,value"
        assert len(rows) == 25
        for row in rows[1:]:
            _, _, value = row.partition(",")
            assert abs(float(value) - expected) <= 1e-12
        assert (tmp_path / "plots" / "forecast_path.svg").is_file()

    def test_gdp_route_cannot_forecast(self, run_cli, noisy_files, tmp_path):
        code, _, err = run_cli(
            "forecast", "--preset", "gdp", "--gdp", noisy_files["gdp"],
            "--index", noisy_files["index"], "--out", tmp_path,
        )
        assert code == 1
        assert "gdp" in err


class TestBacktestCommand:
    def test_noiseless_overlapping_windows_evaluate_exactly(self, run_cli, noiseless_files, tmp_path):
        code, out, _ = run_cli(
            "backtest", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--fit-from", "1995-01", "--fit-to", "2000-12",
            "--eval-from", "1995-01", "--eval-to", "2000-12",
            "--allow-overlap", "--out", tmp_path,
        )
        assert code == 0
        kv = parse_kv(out)
        assert abs(float(kv["a"]) - 170.0) <= 1e-6
        assert float(kv["eval_rms"]) <= 1e-9
        assert kv["n_eval"] == "72"
        assert (tmp_path / "tables" / "backtest_summary.csv").is_file()

    def test_unacknowledged_overlap_is_an_error(self, run_cli, noiseless_files, tmp_path):
        code, _, err = run_cli(
            "backtest", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--fit-from", "1995-01", "--fit-to", "2000-12",
            "--eval-from", "1998-01", "--eval-to", "2002-12",
            "--out", tmp_path,
        )
        assert code == 1
        assert "overlap" in err

    def test_disjoint_windows_need_no_acknowledgement(self, run_cli, noiseless_files, tmp_path):
        code, out, _ = run_cli(
            "backtest", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--fit-from", "1995-01", "--fit-to", "2000-12",
            "--eval-from", "2001-01", "--eval-to", "2005-12",
            "--out", tmp_path,
        )
        assert code == 0
        kv = parse_kv(out)
        assert float(kv["eval_rms"]) <= 1e-9
        assert kv["eval_start"] == "2001-01"

    def test_windows_are_required(self, run_cli, noiseless_files, tmp_path):
        code, _, err = run_cli(
            "backtest", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"], "--out", tmp_path,
        )
        assert code == 1
        assert "fit-from" in err


class TestCointegrateCommand:
    def test_full_table_set_and_verdict(self, run_cli, noisy_files, tmp_path):
        code, out, err = run_cli(
            "cointegrate", "--population", noisy_files["population"],
            "--index", noisy_files["index"], "--out", tmp_path,
        )
        assert code == 0 and err == ""
        for name in ("fit_summary", "unit_root_levels", "unit_root_differences",
                     "residual_tests", "eg_first_stage", "lag_selection", "johansen"):
            assert (tmp_path / "tables" / f"{name}.csv").is_file(), name
        kv = parse_kv(out)
        assert kv["measured_i1"] in ("true", "false")
        assert kv["predicted_i1"] in ("true", "false")
        assert kv["eg_residuals_stationary"] in ("true", "false")
        for trend in ("none", "rconstant", "constant"):
            assert kv[f"johansen_rank_{trend}"] in ("0", "1", "2")
        assert kv["decision_lag"] == "3"
        assert kv["decision_level"] == "1%"

    def test_johansen_table_has_both_ranks_per_trend(self, run_cli, noisy_files, tmp_path):
        code, _, _ = run_cli(
            "cointegrate", "--population", noisy_files["population"],
            "--index", noisy_files["index"], "--no-plots", "--out", tmp_path,
        )
        assert code == 0
        rows = (tmp_path / "tables" / "johansen.csv").read_text().splitlines()
        assert rows[0].startswith("trend,lag,nobs,rank_null")
        assert len(rows) == 1 + 6  # three trends, two null ranks each


class TestReportCommand:
    def test_full_artifact_tree(self, run_cli, noisy_files, tmp_path):
        code, out, err = run_cli(
            "report", "--population", noisy_files["population"],
            "--index", noisy_files["index"], "--out", tmp_path,
        )
        assert code == 0 and err == ""
        assert (tmp_path / "manifest.txt").is_file()
        assert (tmp_path / "tables" / "johansen.csv").is_file()
        assert (tmp_path / "series" / "residuals.csv").is_file()
        assert (tmp_path / "plots" / "returns_comparison.svg").is_file()
        kv = parse_kv(out)
        assert "measured_i1" in kv and "a" in kv
        manifest = (tmp_path / "manifest.txt").read_text()
        assert "input population" in manifest and "sha256=" in manifest

    def test_short_overlap_skips_battery_but_succeeds(self, run_cli, tmp_path):
        code, _, _ = run_cli("synth", "--seed", 9, "--months", 60, "--out", tmp_path / "data")
        assert code == 0
        code, out, err = run_cli(
            "report", "--population", tmp_path / "data" / "population.csv",
            "--index", tmp_path / "data" / "index.csv", "--out", tmp_path / "out",
        )
        assert code == 0
        assert "cointegration battery skipped" in err
        assert "needs 100" in err
        assert not (tmp_path / "out" / "tables" / "johansen.csv").exists()
        assert "a" in parse_kv(out)

    def test_rerun_is_byte_identical(self, run_cli, noisy_files, tmp_path):
        argv = ("report", "--population", noisy_files["population"],
                "--index", noisy_files["index"])
        assert run_cli(*argv, "--out", tmp_path / "a")[0] == 0
        assert run_cli(*argv, "--out", tmp_path / "b")[0] == 0
        assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


class TestOptionHandling:
    def test_config_file_fills_unset_flags(self, run_cli, noiseless_files, tmp_path):
        cfg = tmp_path / "opts.cfg"
        cfg.write_text(
            "# options\n"
            f"population = {noiseless_files['population']}\n"
            f"index = {noiseless_files['index']}\n"
            "preset = intercensal\n"
        )
        code, out, _ = run_cli("fit", "--config", cfg, "--out", tmp_path / "o1")
        assert code == 0
        assert parse_kv(out)["a"] == "165"

    def test_flags_override_config_values(self, run_cli, noiseless_files, tmp_path):
        cfg = tmp_path / "opts.cfg"
        cfg.write_text("preset = intercensal\n")
        code, out, _ = run_cli(
            "fit", "--config", cfg, "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--preset", "postcensal-1990s", "--out", tmp_path / "o2",
        )
        assert code == 0
        assert parse_kv(out)["a"] == "170"

    def test_unknown_config_key_rejected(self, run_cli, tmp_path):
        cfg = tmp_path / "opts.cfg"
        cfg.write_text("wavelength = 3\n")
        code, _, err = run_cli("fit", "--config", cfg, "--out", tmp_path)
        assert code == 1
        assert "unknown option" in err and "wavelength" in err

    def test_duplicate_config_key_rejected(self, run_cli, tmp_path):
        cfg = tmp_path / "opts.cfg"
        cfg.write_text("months = 60\nmonths = 80\n")
        code, _, err = run_cli("synth", "--seed", 1, "--config", cfg, "--out", tmp_path)
        assert code == 1
        assert "duplicate option" in err

    def test_env_var_supplies_output_directory(self, run_cli, tmp_path, monkeypatch):
        monkeypatch.setenv("DEMOTREND_OUT", str(tmp_path / "envout"))
        code, out, _ = run_cli("synth", "--seed", 4)
        assert code == 0
        assert (tmp_path / "envout" / "population.csv").is_file()

    def test_no_output_directory_anywhere_fails(self, run_cli, monkeypatch):
        monkeypatch.delenv("DEMOTREND_OUT", raising=False)
        code, _, err = run_cli("synth", "--seed", 4)
        assert code == 1
        assert "DEMOTREND_OUT" in err

    def test_bad_month_flag(self, run_cli, noiseless_files, tmp_path):
        code, _, err = run_cli(
            "fit", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--fit-from", "1995-13", "--fit-to", "1996-06", "--out", tmp_path,
        )
        assert code == 1
        assert "fit_from" in err and "1..12" in err

    def test_half_open_window_rejected(self, run_cli, noiseless_files, tmp_path):
        code, _, err = run_cli(
            "fit", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--fit-from", "1995-01", "--out", tmp_path,
        )
        assert code == 1
        assert "together" in err

    def test_reversed_window_rejected(self, run_cli, noiseless_files, tmp_path):
        code, _, err = run_cli(
            "fit", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--fit-from", "2000-01", "--fit-to", "1995-01", "--out", tmp_path,
        )
        assert code == 1
        assert "after" in err

    def test_bad_grid_spec_rejected(self, run_cli, noiseless_files, tmp_path):
        code, _, err = run_cli(
            "fit", "--population", noiseless_files["population"],
            "--index", noiseless_files["index"],
            "--method", "grid", "--grid-a", "10:20", "--out", tmp_path,
        )
        assert code == 1
        assert "lo:hi:step" in err
