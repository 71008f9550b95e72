"""Command-line front door.

Subcommands wire the library end to end: `synth` writes seeded fixture
files, `fit` estimates or evaluates the two model coefficients, `forecast`
extends the predicted return path past the last measured month, `backtest`
separates fit and evaluation windows, `cointegrate` runs the unit-root and
cointegration suite on the measured/predicted pair, and `report` emits the
full artifact set in one pass.

Configuration precedence: command-line flags override an optional key=value
config file, and built-in defaults fill whatever remains. Unknown config
keys are rejected against the one option schema. Every command is
deterministic given its options: identical invocations write byte-identical
output trees. Summary values go to stdout as `key = value` lines, data go
to files under the output directory, diagnostics go to stderr, and the exit
status is 0 only when no error path was taken.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import battery as battery_mod
from . import model as model_mod
from .errors import ConfigError, DemotrendError
from .ingest import (
    describe_gdp,
    describe_index,
    describe_population,
    load_gdp,
    load_index,
    load_population,
)
from .model import PRESETS, ModelFit, Prediction, gdp_predictor, measured_returns, predict
from .population import AgePyramid, ProxySpec, n9_change_rate
from .report import PlotSpec, SeriesExport, Table, emit_report, format_value
from .series import MonthKey, MonthlySeries, align
from .synth import config_from_options, make_dataset, write_dataset

ENV_OUT = "DEMOTREND_OUT"

# ---------------------------------------------------------------------------
# option schema


def _int_key(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _float_key(key: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {raw!r}")
    return v


def _month_key(key: str, raw: str) -> MonthKey:
    try:
        return MonthKey.parse(raw)
    except DemotrendError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _bool_key(key: str, raw) -> bool:
    if isinstance(raw, bool):
        return raw
    if raw in ("true", "1", "yes"):
        return True
    if raw in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected true or false, got {raw!r}")


def _choice_key(choices: tuple[str, ...]):
    def coerce(key: str, raw: str) -> str:
        if raw not in choices:
            raise ConfigError(f"{key}: expected one of {', '.join(choices)}, got {raw!r}")
        return raw

    return coerce


def _str_key(key: str, raw: str) -> str:
    return raw


# One schema covers every subcommand; a config file may carry keys the
# current subcommand does not use.
SCHEMA = {
    "population": _str_key,
    "index": _str_key,
    "gdp": _str_key,
    "out": _str_key,
    "seed": _int_key,
    "preset": _choice_key(tuple(PRESETS)),
    "center_age": _int_key,
    "half_width": _int_key,
    "month_window": _int_key,
    "shift_months": _int_key,
    "fit_from": _month_key,
    "fit_to": _month_key,
    "eval_from": _month_key,
    "eval_to": _month_key,
    "exclude_from": _month_key,
    "exclude_to": _month_key,
    "method": _choice_key(("ols", "grid")),
    "grid_a": _str_key,
    "grid_b": _str_key,
    "trend": _choice_key(("none", "constant", "rconstant", "trend")),
    "max_lag": _int_key,
    "dfgls_max_lag": _int_key,
    "allow_overlap": _bool_key,
    "no_plots": _bool_key,
    "months": _int_key,
    "start": _month_key,
    "return_noise_sd": _float_key,
    "count_noise_sd": _float_key,
    "truth_a": _float_key,
    "truth_b": _float_key,
}

DEFAULTS = {
    "method": "ols",
    "trend": "constant",
    "max_lag": 3,
    "dfgls_max_lag": 4,
    "allow_overlap": False,
    "no_plots": False,
    "months": 240,
    "start": MonthKey(1990, 4),
    "return_noise_sd": 0.02,
    "count_noise_sd": 0.0,
    "truth_a": 170.0,
    "truth_b": -0.04,
}


def _parse_config_file(path: str) -> dict[str, str]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw: dict[str, str] = {}
    for i, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{i}: expected key = value, got {line!r}")
        key, _, value = text.partition("=")
        key, value = key.strip(), value.strip()
        if key not in SCHEMA:
            raise ConfigError(f"{path}:{i}: unknown option {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{i}: duplicate option {key!r}")
        raw[key] = value
    return raw


def _merge_options(ns: argparse.Namespace) -> dict:
    """Flags over config file over defaults, coerced against the schema."""
    items = {k: v for k, v in vars(ns).items() if k in SCHEMA}
    if getattr(ns, "config", None):
        for key, value in _parse_config_file(ns.config).items():
            if key in items and items[key] is None:
                items[key] = value
    opts: dict = {}
    for key, value in items.items():
        if value is None:
            opts[key] = DEFAULTS.get(key)
        elif isinstance(value, str):
            opts[key] = SCHEMA[key](key, value)
        else:
            opts[key] = value
    return opts


def _out_dir(opts: dict) -> Path:
    target = opts.get("out") or os.environ.get(ENV_OUT)
    if not target:
        raise ConfigError(f"no output directory: pass --out or set {ENV_OUT}")
    return Path(target)


def _parse_grid(key: str, text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected lo:hi:step, got {text!r}")
    lo = _float_key(key, parts[0])
    hi = _float_key(key, parts[1])
    step = _float_key(key, parts[2])
    if step <= 0:
        raise ConfigError(f"{key}: step must be positive, got {step!r}")
    if hi < lo:
        raise ConfigError(f"{key}: upper bound {hi!r} below lower bound {lo!r}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _month_range(opts: dict, prefix: str):
    lo, hi = opts.get(f"{prefix}_from"), opts.get(f"{prefix}_to")
    if (lo is None) != (hi is None):
        raise ConfigError(f"--{prefix}-from and --{prefix}-to must be given together")
    if lo is None:
        return None
    if hi < lo:
        raise ConfigError(f"--{prefix}-from {lo} is after --{prefix}-to {hi}")
    return (lo, hi)


def _resolve_proxy(opts: dict) -> ProxySpec:
    """Preset proxy (when any) with individual flag overrides on top."""
    preset = PRESETS[opts["preset"]] if opts.get("preset") else None
    base = preset.proxy if preset and preset.proxy else ProxySpec(9, 2, 0, 1)
    return ProxySpec(
        center_age=base.center_age if opts.get("center_age") is None else opts["center_age"],
        half_width=base.half_width if opts.get("half_width") is None else opts["half_width"],
        time_shift=base.time_shift if opts.get("shift_months") is None else opts["shift_months"],
        month_window=base.month_window if opts.get("month_window") is None else opts["month_window"],
    )


def _say(key: str, value) -> None:
    print(f"{key} = {format_value(value)}")


# ---------------------------------------------------------------------------
# shared command plumbing


def _load_inputs(opts: dict):
    """Load whichever of the three inputs the options name.

    Returns (pyramid, prices, gdp, entries); unset inputs come back None.
    """
    pyramid = prices = gdp = None
    entries = []
    if opts.get("population"):
        pyramid = load_population(opts["population"])
        entries.append(describe_population(opts["population"], pyramid))
    if opts.get("index"):
        data = load_index(opts["index"])
        prices = data.series
        entries.append(describe_index(opts["index"], data))
    if opts.get("gdp"):
        gdp = load_gdp(opts["gdp"])
        entries.append(describe_gdp(opts["gdp"], gdp))
    return pyramid, prices, gdp, entries


def _gdp_route(opts: dict) -> bool:
    if opts.get("preset") == "gdp":
        return True
    return bool(opts.get("gdp")) and not opts.get("population")


def _predictor_series(opts: dict, pyramid, gdp) -> tuple[MonthlySeries, str]:
    """The model predictor and its description for the active route."""
    if _gdp_route(opts):
        if gdp is None:
            raise ConfigError("the gdp variant requires --gdp")
        return gdp_predictor(gdp), "two-quarter mean gdp growth"
    if pyramid is None:
        raise ConfigError("the age-proxy route requires --population")
    proxy = _resolve_proxy(opts)
    return n9_change_rate(pyramid, proxy), proxy.describe()


def _fit_pair(opts: dict, measured: MonthlySeries, rate: MonthlySeries, desc: str) -> ModelFit:
    """Fit or, when a preset names the coefficients, evaluate them."""
    fit_range = _month_range(opts, "fit")
    exclude = _exclusions(opts)
    if opts.get("preset"):
        preset = PRESETS[opts["preset"]]
        return model_mod.evaluate_coefficients(
            measured, rate, preset.a, preset.b,
            fit_range=fit_range, exclude=exclude, predictor=desc,
        )
    grid_a = _parse_grid("grid_a", opts["grid_a"]) if opts.get("grid_a") else None
    grid_b = _parse_grid("grid_b", opts["grid_b"]) if opts.get("grid_b") else None
    return model_mod.fit(
        measured, rate, opts["method"],
        grid_a=grid_a, grid_b=grid_b,
        fit_range=fit_range, exclude=exclude, predictor=desc,
    )


def _exclusions(opts: dict):
    rng = _month_range(opts, "exclude")
    return (rng,) if rng else ()


def _fit_summary_table(fitres: ModelFit) -> Table:
    return Table(
        name="fit_summary",
        columns=("a", "b", "rms", "mean_resid", "n_obs", "fit_start", "fit_end", "method", "predictor"),
        rows=((fitres.a, fitres.b, fitres.rms, fitres.mean_resid, fitres.n_obs,
               str(fitres.fit_start), str(fitres.fit_end), fitres.method, fitres.predictor),),
    )


def _print_fit(fitres: ModelFit) -> None:
    _say("a", fitres.a)
    _say("b", fitres.b)
    _say("rms", fitres.rms)
    _say("mean_resid", fitres.mean_resid)
    _say("n_obs", fitres.n_obs)
    _say("fit_start", fitres.fit_start)
    _say("fit_end", fitres.fit_end)
    _say("method", fitres.method)


def _comparison_artifacts(measured: MonthlySeries, rate: MonthlySeries, fitres: ModelFit):
    """Series and plots comparing measured against predicted returns."""
    predicted = predict(rate, fitres.a, fitres.b)
    m, p = align(measured, predicted)
    resid = MonthlySeries(m.start, m.values - p.values, m.unit)
    cum_m = model_mod.cumulate(m)
    cum_p = model_mod.cumulate(p)
    series = [
        SeriesExport("measured_returns", m),
        SeriesExport("predicted_returns", p),
        SeriesExport("residuals", resid),
        SeriesExport("cumulative_measured", cum_m),
        SeriesExport("cumulative_predicted", cum_p),
    ]
    plots = [
        PlotSpec("returns_comparison", (("measured", m), ("predicted", p)), "12m return"),
        PlotSpec("residuals", (("residual", resid),), "residual"),
        PlotSpec("cumulative_comparison", (("measured", cum_m), ("predicted", cum_p)), "cumulative return"),
    ]
    return m, p, series, plots


# ---------------------------------------------------------------------------
# commands


def cmd_synth(opts: dict) -> int:
    if opts.get("seed") is None:
        raise ConfigError("synth requires --seed")
    out = _out_dir(opts)
    proxy = None
    if opts.get("preset") or any(
        opts.get(k) is not None for k in ("center_age", "half_width", "month_window", "shift_months")
    ):
        proxy = _resolve_proxy(opts)
    cfg = config_from_options(
        opts["seed"],
        start=opts["start"],
        months=opts["months"],
        truth_a=opts["truth_a"],
        truth_b=opts["truth_b"],
        return_noise_sd=opts["return_noise_sd"],
        count_noise_sd=opts["count_noise_sd"],
        proxy=proxy,
    )
    data = make_dataset(cfg)
    paths = write_dataset(data, out)
    _say("seed", cfg.seed)
    _say("months", cfg.months)
    _say("start", cfg.start)
    _say("truth_a", cfg.truth_a)
    _say("truth_b", cfg.truth_b)
    _say("return_noise_sd", cfg.return_noise_sd)
    _say("count_noise_sd", cfg.count_noise_sd)
    for key in ("population", "index", "gdp", "truth"):
        _say(key, paths[key])
    return 0


def cmd_fit(opts: dict) -> int:
    out = _out_dir(opts)
    pyramid, prices, gdp, entries = _load_inputs(opts)
    if prices is None:
        raise ConfigError("fit requires --index")
    measured = measured_returns(prices)
    rate, desc = _predictor_series(opts, pyramid, gdp)
    fitres = _fit_pair(opts, measured, rate, desc)
    _, _, series, plots = _comparison_artifacts(measured, rate, fitres)
    written = emit_report(
        [_fit_summary_table(fitres)], series, out,
        plots=() if opts["no_plots"] else plots, inputs=entries,
    )
    _print_fit(fitres)
    _say("predictor", fitres.predictor)
    _say("out", out)
    _say("files", len(written))
    return 0


def cmd_forecast(opts: dict) -> int:
    out = _out_dir(opts)
    if _gdp_route(opts):
        raise ConfigError("forecast extends an age proxy; the gdp variant has no shifted predictor")
    pyramid, prices, gdp, entries = _load_inputs(opts)
    if prices is None:
        raise ConfigError("forecast requires --index")
    proxy = _resolve_proxy(opts)
    if proxy.time_shift <= 0:
        raise ConfigError(
            f"forecast needs a positive time shift, got {proxy.time_shift}; "
            "a zero or backward shift is not a forecast"
        )
    measured = measured_returns(prices)
    rate, desc = _predictor_series(opts, pyramid, gdp)
    fitres = _fit_pair(opts, measured, rate, desc)
    predicted = predict(rate, fitres.a, fitres.b)
    if not predicted.end > measured.end:
        short = measured.end.diff(predicted.end)
        raise ConfigError(
            f"nothing to forecast: predicted path ends {predicted.end} but measured returns "
            f"already cover {measured.end}; the young-age data fall {short} months short"
        )
    future = predicted.slice(measured.end.plus(1), predicted.end)
    prediction = Prediction(series=future, horizon_months=len(future), model=fitres)
    _, _, series, plots = _comparison_artifacts(measured, rate, fitres)
    series.append(SeriesExport("forecast", future))
    plots.append(PlotSpec("forecast_path", (("measured", measured), ("predicted", predicted)), "12m return"))
    written = emit_report(
        [_fit_summary_table(fitres)], series, out,
        plots=() if opts["no_plots"] else plots, inputs=entries,
    )
    _print_fit(fitres)
    _say("horizon_months", prediction.horizon_months)
    _say("forecast_start", future.start)
    _say("forecast_end", future.end)
    _say("out", out)
    _say("files", len(written))
    return 0


def cmd_backtest(opts: dict) -> int:
    out = _out_dir(opts)
    if _gdp_route(opts):
        raise ConfigError("backtest runs on the age-proxy route; use fit or report for the gdp variant")
    pyramid, prices, gdp, entries = _load_inputs(opts)
    if pyramid is None or prices is None:
        raise ConfigError("backtest requires --population and --index")
    fit_range = _month_range(opts, "fit")
    eval_range = _month_range(opts, "eval")
    if fit_range is None or eval_range is None:
        raise ConfigError("backtest requires --fit-from/--fit-to and --eval-from/--eval-to")
    proxy = _resolve_proxy(opts)
    coefficients = None
    if opts.get("preset"):
        preset = PRESETS[opts["preset"]]
        coefficients = (preset.a, preset.b)
    grid_a = _parse_grid("grid_a", opts["grid_a"]) if opts.get("grid_a") else None
    grid_b = _parse_grid("grid_b", opts["grid_b"]) if opts.get("grid_b") else None
    report = model_mod.backtest(
        pyramid, prices, proxy, fit_range, eval_range,
        method=opts["method"], coefficients=coefficients,
        grid_a=grid_a, grid_b=grid_b,
        exclude=_exclusions(opts), allow_overlap=opts["allow_overlap"],
    )
    measured = measured_returns(prices)
    rate = n9_change_rate(pyramid, proxy)
    _, _, series, plots = _comparison_artifacts(measured, rate, report.fit)
    table = Table(
        name="backtest_summary",
        columns=("a", "b", "fit_rms", "fit_mean_resid", "fit_start", "fit_end", "n_fit",
                 "eval_start", "eval_end", "n_eval", "eval_rms", "eval_mean", "eval_std",
                 "naive_std", "overlap_acknowledged"),
        rows=((report.fit.a, report.fit.b, report.fit.rms, report.fit.mean_resid,
               str(report.fit.fit_start), str(report.fit.fit_end), report.fit.n_obs,
               str(report.eval_start), str(report.eval_end), report.n_eval,
               report.eval_rms, report.eval_mean, report.eval_std,
               report.naive_std, report.overlap_acknowledged),),
    )
    written = emit_report(
        [table], series, out,
        plots=() if opts["no_plots"] else plots, inputs=entries,
    )
    _print_fit(report.fit)
    _say("eval_start", report.eval_start)
    _say("eval_end", report.eval_end)
    _say("n_eval", report.n_eval)
    _say("eval_rms", report.eval_rms)
    _say("eval_mean", report.eval_mean)
    _say("eval_std", report.eval_std)
    _say("naive_std", report.naive_std)
    _say("out", out)
    _say("files", len(written))
    return 0


_UNIT_ROOT_COLUMNS = (
    "series", "test", "trend", "lag", "nobs", "statistic",
    "crit_1pct", "crit_5pct", "crit_10pct",
    "source_1pct", "source_5pct", "source_10pct", "reject_at",
)


def _unit_root_rows(label: str, reports) -> list[tuple]:
    rows = []
    for r in reports:
        rows.append((
            label, r.test, r.trend, r.lag, r.nobs, r.statistic,
            r.crit["1%"], r.crit["5%"], r.crit["10%"],
            r.crit_source["1%"], r.crit_source["5%"], r.crit_source["10%"],
            r.reject_at or "",
        ))
    return rows


def _battery_tables(report: battery_mod.BatteryReport) -> list[Table]:
    level_rows: list[tuple] = []
    diff_rows: list[tuple] = []
    for label in ("measured", "predicted"):
        level_rows += _unit_root_rows(label, report.levels_adf[label])
        level_rows += _unit_root_rows(label, report.levels_dfgls[label])
        diff_rows += _unit_root_rows(label, report.diffs_adf[label])
        diff_rows += _unit_root_rows(label, report.diffs_dfgls[label])
    resid_rows = _unit_root_rows("eg_residual", report.eg.adf_residual)
    resid_rows += _unit_root_rows("eg_residual", report.eg.dfgls_residual)

    first = report.eg.first_stage
    eg_table = Table(
        name="eg_first_stage",
        columns=("slope", "intercept", "se_slope", "se_intercept", "t_slope", "t_intercept",
                 "r2", "rmse", "nobs"),
        rows=((first.coef[0], first.coef[1], first.se[0], first.se[1],
               first.tstats[0], first.tstats[1], first.r2, first.rmse, first.nobs),),
    )

    sel = report.lag_selection
    by_lag: dict[int, list[str]] = {}
    for crit_name, lag in sorted(sel.selected.items()):
        if lag is not None:
            by_lag.setdefault(lag, []).append(crit_name)
    lag_rows = []
    for row in sel.rows:
        lag_rows.append((
            row.lag, row.loglik,
            row.lr if row.lr is not None else "",
            row.lr_pvalue if row.lr_pvalue is not None else "",
            row.fpe, row.aic, row.hqic, row.sbic,
            ";".join(by_lag.get(row.lag, [])),
        ))
    lag_table = Table(
        name="lag_selection",
        columns=("lag", "loglik", "lr", "lr_pvalue", "fpe", "aic", "hqic", "sbic", "selected_by"),
        rows=tuple(lag_rows),
    )

    joh_rows = []
    for trend_name in battery_mod.JOHANSEN_TRENDS:
        rep = report.johansen[trend_name]
        for r in range(len(rep.trace)):
            joh_rows.append((
                trend_name, rep.lag, rep.nobs, r,
                rep.eigenvalues[r], rep.trace[r], rep.crit[r], rep.crit_source[r],
                bool(rep.trace[r] >= rep.crit[r]), rep.selected_rank,
            ))
    joh_table = Table(
        name="johansen",
        columns=("trend", "lag", "nobs", "rank_null", "eigenvalue", "trace",
                 "crit_5pct", "source", "rejected", "selected_rank"),
        rows=tuple(joh_rows),
    )

    return [
        Table("unit_root_levels", _UNIT_ROOT_COLUMNS, tuple(level_rows)),
        Table("unit_root_differences", _UNIT_ROOT_COLUMNS, tuple(diff_rows)),
        Table("residual_tests", _UNIT_ROOT_COLUMNS, tuple(resid_rows)),
        eg_table,
        lag_table,
        joh_table,
    ]


def _print_verdict(report: battery_mod.BatteryReport) -> None:
    v = report.verdict
    _say("measured_i1", v.measured_i1)
    _say("predicted_i1", v.predicted_i1)
    _say("eg_residuals_stationary", v.eg_residuals_stationary)
    for trend_name in battery_mod.JOHANSEN_TRENDS:
        _say(f"johansen_rank_{trend_name}", v.johansen_rank[trend_name])
    _say("decision_lag", v.decision_lag)
    _say("decision_level", v.decision_level)


def cmd_cointegrate(opts: dict) -> int:
    out = _out_dir(opts)
    pyramid, prices, gdp, entries = _load_inputs(opts)
    if prices is None:
        raise ConfigError("cointegrate requires --index")
    measured = measured_returns(prices)
    rate, desc = _predictor_series(opts, pyramid, gdp)
    fitres = _fit_pair(opts, measured, rate, desc)
    m, p, series, plots = _comparison_artifacts(measured, rate, fitres)
    report = battery_mod.run_battery(
        m.values, p.values,
        max_lag=opts["max_lag"], dfgls_max_lag=opts["dfgls_max_lag"],
        trend=opts["trend"],
    )
    tables = [_fit_summary_table(fitres)] + _battery_tables(report)
    written = emit_report(
        tables, series, out,
        plots=() if opts["no_plots"] else plots, inputs=entries,
    )
    _print_fit(fitres)
    _print_verdict(report)
    _say("out", out)
    _say("files", len(written))
    return 0


def cmd_report(opts: dict) -> int:
    out = _out_dir(opts)
    pyramid, prices, gdp, entries = _load_inputs(opts)
    if prices is None:
        raise ConfigError("report requires --index")
    measured = measured_returns(prices)
    rate, desc = _predictor_series(opts, pyramid, gdp)
    fitres = _fit_pair(opts, measured, rate, desc)
    m, p, series, plots = _comparison_artifacts(measured, rate, fitres)
    tables = [_fit_summary_table(fitres)]
    battery_report = None
    if len(m) >= 100:
        battery_report = battery_mod.run_battery(
            m.values, p.values,
            max_lag=opts["max_lag"], dfgls_max_lag=opts["dfgls_max_lag"],
            trend=opts["trend"],
        )
        tables += _battery_tables(battery_report)
    else:
        print(
            f"cointegration battery skipped: overlap is {len(m)} months, needs 100",
            file=sys.stderr,
        )
    written = emit_report(
        tables, series, out,
        plots=() if opts["no_plots"] else plots, inputs=entries,
    )
    _print_fit(fitres)
    _say("predictor", fitres.predictor)
    if battery_report is not None:
        _print_verdict(battery_report)
    _say("out", out)
    _say("files", len(written))
    return 0


# ---------------------------------------------------------------------------
# parser


def _add(parser: argparse.ArgumentParser, *names: str, flag: bool = False, **kwargs) -> None:
    if flag:
        parser.add_argument(*names, action="store_true", default=None, **kwargs)
    else:
        parser.add_argument(*names, default=None, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demotrend",
        description="Fit, backtest and stress-test the demographic return model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        _add(p, "--config", help="key=value options file; flags take precedence")
        _add(p, "--out", help=f"output directory (default ${ENV_OUT})")
        _add(p, "--seed", help="integer seed for seeded commands")
        _add(p, "--no-plots", flag=True, help="skip chart rendering")

    def data(p: argparse.ArgumentParser) -> None:
        _add(p, "--population", help="age pyramid csv")
        _add(p, "--index", help="index level csv")
        _add(p, "--gdp", help="quarterly gdp csv")

    def proxy(p: argparse.ArgumentParser) -> None:
        _add(p, "--preset", help=f"coefficient preset: {', '.join(PRESETS)}")
        _add(p, "--center-age", help="center of the age band")
        _add(p, "--half-width", help="ages kept on each side of the center")
        _add(p, "--month-window", help="trailing smoothing window, months")
        _add(p, "--shift-months", help="relocate the smoothed series, months")

    def fitctl(p: argparse.ArgumentParser) -> None:
        _add(p, "--method", help="fit method: ols or grid")
        _add(p, "--grid-a", help="grid lattice for a, lo:hi:step")
        _add(p, "--grid-b", help="grid lattice for b, lo:hi:step")
        _add(p, "--fit-from", help="first month of the fit window, YYYY-MM")
        _add(p, "--fit-to", help="last month of the fit window, YYYY-MM")
        _add(p, "--exclude-from", help="first excluded month, YYYY-MM")
        _add(p, "--exclude-to", help="last excluded month, YYYY-MM")

    def econ(p: argparse.ArgumentParser) -> None:
        _add(p, "--trend", help="deterministic terms: none, constant, rconstant or trend")
        _add(p, "--max-lag", help="lagged differences for adf and the battery decision")
        _add(p, "--dfgls-max-lag", help="lagged differences for dfgls")

    p_synth = sub.add_parser("synth", help="write seeded synthetic fixture files")
    common(p_synth)
    proxy(p_synth)
    _add(p_synth, "--months", help="pyramid length in months")
    _add(p_synth, "--start", help="first pyramid month, YYYY-MM")
    _add(p_synth, "--return-noise-sd", help="gaussian sd added to the return target")
    _add(p_synth, "--count-noise-sd", help="lognormal sd applied to pyramid counts")
    _add(p_synth, "--truth-a", help="ground-truth slope")
    _add(p_synth, "--truth-b", help="ground-truth intercept")
    p_synth.set_defaults(func=cmd_synth)

    p_fit = sub.add_parser("fit", help="estimate or evaluate the model coefficients")
    for section in (common, data, proxy, fitctl):
        section(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_forecast = sub.add_parser("forecast", help="extend the predicted path past measured data")
    for section in (common, data, proxy, fitctl):
        section(p_forecast)
    p_forecast.set_defaults(func=cmd_forecast)

    p_backtest = sub.add_parser("backtest", help="fit on one window, evaluate on another")
    for section in (common, data, proxy, fitctl):
        section(p_backtest)
    _add(p_backtest, "--eval-from", help="first month of the evaluation window, YYYY-MM")
    _add(p_backtest, "--eval-to", help="last month of the evaluation window, YYYY-MM")
    _add(p_backtest, "--allow-overlap", flag=True,
         help="acknowledge overlapping fit and eval windows")
    p_backtest.set_defaults(func=cmd_backtest)

    p_coint = sub.add_parser("cointegrate", help="run the unit-root and cointegration suite")
    for section in (common, data, proxy, fitctl, econ):
        section(p_coint)
    p_coint.set_defaults(func=cmd_cointegrate)

    p_report = sub.add_parser("report", help="emit the full artifact set in one pass")
    for section in (common, data, proxy, fitctl, econ):
        section(p_report)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        opts = _merge_options(ns)
        return ns.func(opts)
    except DemotrendError as exc:
        print(f"demotrend: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
