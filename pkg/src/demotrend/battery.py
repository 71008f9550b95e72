"""The full cointegration battery run on a (measured, predicted) return pair.

Order of operations: unit-root tests on levels and first differences of both
series, VAR lag-order statistics, the two-step residual test, and the trace
rank test under all three deterministic specs. Verdicts are decided on the
battery's configured lag row at the 1% level for unit roots (matching how
the embedded calibration defaults are quoted) and at 5% for the trace test.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .econometrics import (
    EngleGrangerResult,
    JohansenReport,
    LagSelection,
    UnitRootReport,
    adf,
    dfgls,
    engle_granger,
    johansen,
    lag_select,
    rejected_at,
)
from .errors import SeriesError

JOHANSEN_TRENDS = ("none", "rconstant", "constant")


@dataclass(frozen=True)
class BatteryVerdict:
    """Boolean summary used by callers that need a decision, not a table.

    A series is deemed integrated of order one when its level fails to
    reject at the decision level while its first difference rejects.
    """

    measured_i1: bool
    predicted_i1: bool
    eg_residuals_stationary: bool
    johansen_rank: dict[str, int]
    decision_lag: int
    decision_level: str


@dataclass(frozen=True)
class BatteryReport:
    levels_adf: dict[str, list[UnitRootReport]]
    levels_dfgls: dict[str, list[UnitRootReport]]
    diffs_adf: dict[str, list[UnitRootReport]]
    diffs_dfgls: dict[str, list[UnitRootReport]]
    lag_selection: LagSelection
    eg: EngleGrangerResult
    johansen: dict[str, JohansenReport]
    verdict: BatteryVerdict


def _i1_verdict(level: UnitRootReport, diff: UnitRootReport, decision_level: str) -> bool:
    return (not rejected_at(level, decision_level)) and rejected_at(diff, decision_level)


def _row(reports: list[UnitRootReport], lag: int) -> UnitRootReport:
    for r in reports:
        if r.lag == lag:
            return r
    return reports[-1]


def run_battery(
    measured,
    predicted,
    *,
    max_lag: int = 3,
    dfgls_max_lag: int = 4,
    lagsel_max_lag: int = 4,
    trend: str = "constant",
    johansen_lag: Optional[int] = None,
    decision_level: str = "1%",
) -> BatteryReport:
    """Run every test of the suite on an aligned return pair.

    `measured` and `predicted` are equal-length 1-D arrays (or monthly
    series) of at least 100 observations. `trend` drives the level and
    difference unit-root tests; the residual tests always run with no
    deterministic terms, and the trace test runs under all three of its
    specs. johansen_lag defaults to max_lag.
    """
    m = np.asarray(getattr(measured, "values", measured), dtype=float)
    p = np.asarray(getattr(predicted, "values", predicted), dtype=float)
    if m.ndim != 1 or p.ndim != 1:
        raise SeriesError("battery inputs must be one-dimensional")
    if len(m) != len(p):
        raise SeriesError(f"aligned series required, got lengths {len(m)} and {len(p)}")
    if len(m) < 100:
        raise SeriesError(f"battery needs at least 100 months, got {len(m)}")
    if johansen_lag is None:
        johansen_lag = max_lag

    pair = {"measured": m, "predicted": p}
    levels_adf = {k: adf(v, max_lag, trend) for k, v in pair.items()}
    levels_dfgls = {k: dfgls(v, dfgls_max_lag, trend) for k, v in pair.items()}
    diffs = {k: np.diff(v) for k, v in pair.items()}
    diffs_adf = {k: adf(v, max_lag, trend) for k, v in diffs.items()}
    diffs_dfgls = {k: dfgls(v, dfgls_max_lag, trend) for k, v in diffs.items()}
    selection = lag_select(np.column_stack([m, p]), lagsel_max_lag)
    eg = engle_granger(m, p, max_lag)
    rank_tests = {t: johansen(np.column_stack([m, p]), johansen_lag, t) for t in JOHANSEN_TRENDS}

    verdict = BatteryVerdict(
        measured_i1=_i1_verdict(
            _row(levels_adf["measured"], max_lag), _row(diffs_adf["measured"], max_lag), decision_level
        ),
        predicted_i1=_i1_verdict(
            _row(levels_adf["predicted"], max_lag), _row(diffs_adf["predicted"], max_lag), decision_level
        ),
        eg_residuals_stationary=rejected_at(_row(list(eg.adf_residual), max_lag), decision_level),
        johansen_rank={t: rank_tests[t].selected_rank for t in JOHANSEN_TRENDS},
        decision_lag=max_lag,
        decision_level=decision_level,
    )
    return BatteryReport(
        levels_adf=levels_adf,
        levels_dfgls=levels_dfgls,
        diffs_adf=diffs_adf,
        diffs_dfgls=diffs_dfgls,
        lag_selection=selection,
        eg=eg,
        johansen=rank_tests,
        verdict=verdict,
    )
