"""The linear return model: R(t) = A * rate(t) + B.

`rate` is the log change rate of a smoothed young-age count series (or a
two-quarter mean of GDP growth for the macro variant) and R is the 12-month
cumulative return of an index. This module fits, evaluates and backtests the
two coefficients and carries the named presets for the documented regimes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigError, DegenerateInputError, SeriesError
from .population import AgePyramid, ProxySpec, n9_change_rate
from .series import (
    UNIT_GROWTH,
    UNIT_LOGDIFF,
    UNIT_RETURN,
    MonthKey,
    MonthlySeries,
    QuarterlySeries,
    align,
    cumulative_return_12m,
    monthly_return,
)

MonthRange = tuple[MonthKey, MonthKey]


@dataclass(frozen=True)
class Preset:
    """A named coefficient pair plus the proxy configuration it belongs to."""

    a: float
    b: float
    proxy: Optional[ProxySpec]
    note: str


# Coefficient presets for the documented regimes. The gdp preset has no age
# proxy; its predictor comes from gdp_predict.
PRESETS: dict[str, Preset] = {
    "postcensal-1990s": Preset(170.0, -0.04, ProxySpec(9, 2, 0, 1), "nine-year-olds, postcensal counts"),
    "intercensal": Preset(165.0, -0.055, ProxySpec(9, 2, 0, 1), "nine-year-olds, intercensal counts"),
    "7yo-horizon": Preset(165.0, -0.061, ProxySpec(7, 2, 24, 1), "seven-year-olds moved two years ahead"),
    "17yo-back": Preset(35.0, 0.089, ProxySpec(17, 0, -96, 4), "seventeen-year-olds moved eight years back"),
    "post-2005": Preset(30.0, -0.1, ProxySpec(3, 2, 72, 1), "three-year-olds moved six years ahead"),
    "gdp": Preset(10.0, -0.25, None, "two-quarter mean of annualized GDP growth"),
}


@dataclass(frozen=True)
class ModelFit:
    """Fitted (or evaluated) coefficients with in-sample residual stats."""

    a: float
    b: float
    rms: float
    mean_resid: float
    fit_start: MonthKey
    fit_end: MonthKey
    n_obs: int
    predictor: str
    method: str


@dataclass(frozen=True)
class Prediction:
    """A forward return path produced by a positive-shift proxy."""

    series: MonthlySeries
    horizon_months: int
    model: ModelFit


@dataclass(frozen=True)
class BacktestReport:
    """Out-of-sample evaluation of a fit over a disjoint month range."""

    fit: ModelFit
    eval_start: MonthKey
    eval_end: MonthKey
    n_eval: int
    eval_rms: float
    eval_mean: float
    eval_std: float
    naive_std: float
    overlap_acknowledged: bool


def predict(rate: MonthlySeries, a: float, b: float) -> MonthlySeries:
    """Apply R = a * rate + b month by month.

    The predictor is a log change rate for the population proxies or a
    growth-rate series for the macro variant, so both tags are accepted.
    """
    if rate.unit not in (UNIT_LOGDIFF, UNIT_RETURN):
        raise SeriesError(f"predict expects a log-difference or return-rate series, got {rate.unit}")
    return MonthlySeries(rate.start, a * rate.values + b, UNIT_RETURN)


def cumulate(returns: MonthlySeries) -> MonthlySeries:
    """Running sum of a return series, starting at its own first month."""
    if returns.unit != UNIT_RETURN:
        raise SeriesError(f"cumulate expects a dimensionless-return series, got {returns.unit}")
    return MonthlySeries(returns.start, np.cumsum(returns.values), UNIT_RETURN)


def _mask_for(series: MonthlySeries, exclude: Iterable[MonthRange]) -> np.ndarray:
    keep = np.ones(len(series), dtype=bool)
    for first, last in exclude:
        if last < first:
            raise SeriesError(f"exclusion range {first}..{last} is empty")
        lo = max(first.diff(series.start), 0)
        hi = min(last.diff(series.start), len(series) - 1)
        if lo <= hi:
            keep[lo : hi + 1] = False
    return keep


def _prepare(
    measured: MonthlySeries,
    rate: MonthlySeries,
    fit_range: Optional[MonthRange],
    exclude: Iterable[MonthRange],
):
    if measured.unit != UNIT_RETURN:
        raise SeriesError(f"measured series must be dimensionless-return, got {measured.unit}")
    if rate.unit not in (UNIT_LOGDIFF, UNIT_RETURN):
        raise SeriesError(f"rate series must be log-difference or return-rate, got {rate.unit}")
    m, r = align(measured, rate)
    if fit_range is not None:
        first, last = fit_range
        first = max(first, m.start)
        last = min(last, m.end)
        if last < first:
            raise SeriesError(
                f"fit range {fit_range[0]}..{fit_range[1]} does not intersect data {m.start}..{m.end}"
            )
        m, r = m.slice(first, last), r.slice(first, last)
    keep = _mask_for(m, exclude)
    return m, r, keep


def _stats(resid: np.ndarray) -> tuple[float, float]:
    return float(np.sqrt(np.mean(resid * resid))), float(np.mean(resid))


def fit(
    measured: MonthlySeries,
    rate: MonthlySeries,
    method: str = "ols",
    *,
    grid_a: Optional[Sequence[float]] = None,
    grid_b: Optional[Sequence[float]] = None,
    fit_range: Optional[MonthRange] = None,
    exclude: Iterable[MonthRange] = (),
    predictor: str = "",
    min_overlap: int = 24,
) -> ModelFit:
    """Fit the two coefficients on the aligned overlap of measured and rate.

    method "ols" uses the closed-form least squares solution. method "grid"
    exhaustively scans the caller-supplied (grid_a, grid_b) lattice for the
    lowest rms, breaking ties deterministically toward the smallest a, then
    the smallest b. Months inside `exclude` ranges are masked out, never
    mutated. At least `min_overlap` usable months are required.
    """
    m, r, keep = _prepare(measured, rate, fit_range, exclude)
    n = int(keep.sum())
    if n < min_overlap:
        raise SeriesError(f"only {n} usable months in {m.start}..{m.end}, need at least {min_overlap}")
    mv = m.values[keep]
    rv = r.values[keep]

    if method == "ols":
        rc = rv - rv.mean()
        denom = float(rc @ rc)
        if denom <= 0.0 or denom < 1e-30 * n:
            raise DegenerateInputError("rate series has zero variance over the fit window")
        a = float(rc @ (mv - mv.mean())) / denom
        b = float(mv.mean() - a * rv.mean())
    elif method == "grid":
        if grid_a is None or grid_b is None or len(grid_a) == 0 or len(grid_b) == 0:
            raise ConfigError("grid fit needs non-empty grid_a and grid_b lattices")
        a, b = _grid_scan(mv, rv, grid_a, grid_b)
    else:
        raise ConfigError(f"unknown fit method {method!r}, expected ols or grid")

    rms, mean_resid = _stats(mv - (a * rv + b))
    return ModelFit(a, b, rms, mean_resid, m.start, m.end, n, predictor, method)


def _grid_scan(mv: np.ndarray, rv: np.ndarray, grid_a: Sequence[float], grid_b: Sequence[float]) -> tuple[float, float]:
    best = (np.inf, np.inf, np.inf)  # (rms, a, b); tuple order implements the tie-break
    for a in sorted(float(x) for x in grid_a):
        resid_a = mv - a * rv
        for b in sorted(float(x) for x in grid_b):
            resid = resid_a - b
            rms = float(np.sqrt(np.mean(resid * resid)))
            cand = (rms, a, b)
            if cand < best:
                best = cand
    return best[1], best[2]


def evaluate_coefficients(
    measured: MonthlySeries,
    rate: MonthlySeries,
    a: float,
    b: float,
    *,
    fit_range: Optional[MonthRange] = None,
    exclude: Iterable[MonthRange] = (),
    predictor: str = "",
) -> ModelFit:
    """Residual stats of fixed coefficients over the aligned overlap."""
    m, r, keep = _prepare(measured, rate, fit_range, exclude)
    n = int(keep.sum())
    if n < 1:
        raise SeriesError("no usable months to evaluate")
    resid = m.values[keep] - (a * r.values[keep] + b)
    rms, mean_resid = _stats(resid)
    return ModelFit(float(a), float(b), rms, mean_resid, m.start, m.end, n, predictor, "preset")


def measured_returns(prices: MonthlySeries) -> MonthlySeries:
    """12-month cumulative returns derived from index closes."""
    return cumulative_return_12m(monthly_return(prices))


def gdp_predictor(gdp: QuarterlySeries) -> MonthlySeries:
    """Monthly predictor from quarterly annualized GDP growth.

    The value for a month in quarter q is the mean annualized growth of the
    two previous quarters, q-1 and q-2; the series steps, holding that value
    for all three months of q. With n input quarters the output covers
    quarters 3..n+1 of the input axis (3*(n-1) months): every quarter whose
    two predecessors are known, including the one just past the data.
    """
    if gdp.unit != UNIT_GROWTH:
        raise SeriesError(f"gdp predictor expects a growth-rate series, got {gdp.unit}")
    n = len(gdp)
    if n < 2:
        raise SeriesError(f"gdp predictor needs at least 2 quarters, got {n}")
    v = gdp.values
    two_quarter_mean = (v[1:] + v[:-1]) / 2.0
    return MonthlySeries(gdp.start.plus(2).first_month(), np.repeat(two_quarter_mean, 3), UNIT_RETURN)


def gdp_predict(gdp: QuarterlySeries, a: float = 10.0, b: float = -0.25) -> MonthlySeries:
    """Return prediction a * g + b from the two-quarter GDP growth predictor."""
    return predict(gdp_predictor(gdp), a, b)


def backtest(
    pyramid: AgePyramid,
    prices: MonthlySeries,
    spec: ProxySpec,
    fit_range: MonthRange,
    eval_range: MonthRange,
    *,
    method: str = "ols",
    coefficients: Optional[tuple[float, float]] = None,
    grid_a: Optional[Sequence[float]] = None,
    grid_b: Optional[Sequence[float]] = None,
    exclude: Iterable[MonthRange] = (),
    allow_overlap: bool = False,
) -> BacktestReport:
    """Fit on one month range, evaluate residuals on another.

    The two ranges must be disjoint unless allow_overlap acknowledges the
    leakage. `coefficients` skips fitting and evaluates a fixed (a, b)
    instead. The report carries the standard deviation of the measured
    series over the evaluation window as the naive baseline.
    """
    overlap = not (fit_range[1] < eval_range[0] or eval_range[1] < fit_range[0])
    if overlap and not allow_overlap:
        raise SeriesError(
            f"fit range {fit_range[0]}..{fit_range[1]} overlaps eval range "
            f"{eval_range[0]}..{eval_range[1]}; pass allow_overlap to acknowledge"
        )
    measured = measured_returns(prices)
    rate = n9_change_rate(pyramid, spec)
    if coefficients is not None:
        fitted = evaluate_coefficients(
            measured, rate, coefficients[0], coefficients[1],
            fit_range=fit_range, exclude=exclude, predictor=spec.describe(),
        )
    else:
        fitted = fit(
            measured, rate, method,
            grid_a=grid_a, grid_b=grid_b, fit_range=fit_range,
            exclude=exclude, predictor=spec.describe(),
        )
    m, r, keep = _prepare(measured, rate, eval_range, exclude)
    n_eval = int(keep.sum())
    if n_eval < 1:
        raise SeriesError("no usable months in the evaluation range")
    mv, rv = m.values[keep], r.values[keep]
    resid = mv - (fitted.a * rv + fitted.b)
    eval_rms, eval_mean = _stats(resid)
    return BacktestReport(
        fit=fitted,
        eval_start=m.start,
        eval_end=m.end,
        n_eval=n_eval,
        eval_rms=eval_rms,
        eval_mean=eval_mean,
        eval_std=float(np.std(resid)),
        naive_std=float(np.std(mv)),
        overlap_acknowledged=overlap,
    )
