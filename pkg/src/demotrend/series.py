"""Calendar-indexed monthly and quarterly series and the arithmetic on them.

Core vocabulary for the rest of the package:

    MonthKey, QuarterKey    calendar positions with wrap-around arithmetic
    MonthlySeries           contiguous monthly floats with a unit tag
    QuarterlySeries         contiguous quarterly floats with a unit tag

    monthly_return          arithmetic month-over-month returns of a price series
    cumulative_return_12m   rolling sum of the last 12 monthly returns
    annual_ratio_return     P(t) / P(t-12) - 1
    dln                     first difference of the natural logarithm
    moving_average          trailing mean over a fixed month window
    align                   trim two series to their common month range
    quarterly_to_monthly    bridge quarterly values onto a monthly axis

All values are immutable after construction; operations return new series.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import SeriesError

UNIT_INDEX = "index-points"
UNIT_PERSONS = "persons"
UNIT_RETURN = "dimensionless-return"
UNIT_LOGDIFF = "log-difference"
MONTHLY_UNITS = frozenset({UNIT_INDEX, UNIT_PERSONS, UNIT_RETURN, UNIT_LOGDIFF})

UNIT_GROWTH = "growth-rate"
UNIT_LEVEL = "level"
QUARTERLY_UNITS = frozenset({UNIT_GROWTH, UNIT_LEVEL})

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")
_QUARTER_RE = re.compile(r"^(\d{4})-Q([1-4])$")


@dataclass(frozen=True, order=True)
class MonthKey:
    """A calendar month. Ordering is lexicographic on (year, month)."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not isinstance(self.year, int) or not isinstance(self.month, int):
            raise SeriesError(f"month key needs integer year and month, got {self.year!r}-{self.month!r}")
        if not 1 <= self.month <= 12:
            raise SeriesError(f"month must be in 1..12, got {self.month}")

    @classmethod
    def parse(cls, text: str) -> "MonthKey":
        m = _MONTH_RE.match(text.strip())
        if m is None:
            raise SeriesError(f"expected month as YYYY-MM, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def plus(self, months: int) -> "MonthKey":
        """The month `months` steps ahead (negative steps go back), wrapping years."""
        idx = self.year * 12 + (self.month - 1) + months
        return MonthKey(idx // 12, idx % 12 + 1)

    def diff(self, other: "MonthKey") -> int:
        """Whole months from `other` to self; positive when self is later."""
        return (self.year - other.year) * 12 + (self.month - other.month)

    @property
    def quarter(self) -> "QuarterKey":
        return QuarterKey(self.year, (self.month - 1) // 3 + 1)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True, order=True)
class QuarterKey:
    """A calendar quarter, 1..4 within a year."""

    year: int
    quarter: int

    def __post_init__(self) -> None:
        if not isinstance(self.year, int) or not isinstance(self.quarter, int):
            raise SeriesError(f"quarter key needs integers, got {self.year!r}-Q{self.quarter!r}")
        if not 1 <= self.quarter <= 4:
            raise SeriesError(f"quarter must be in 1..4, got {self.quarter}")

    @classmethod
    def parse(cls, text: str) -> "QuarterKey":
        m = _QUARTER_RE.match(text.strip())
        if m is None:
            raise SeriesError(f"expected quarter as YYYY-Qn, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def plus(self, quarters: int) -> "QuarterKey":
        idx = self.year * 4 + (self.quarter - 1) + quarters
        return QuarterKey(idx // 4, idx % 4 + 1)

    def diff(self, other: "QuarterKey") -> int:
        return (self.year - other.year) * 4 + (self.quarter - other.quarter)

    def first_month(self) -> MonthKey:
        return MonthKey(self.year, 3 * (self.quarter - 1) + 1)

    def __str__(self) -> str:
        return f"{self.year:04d}-Q{self.quarter}"


def _freeze(values, unit: str, kind: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise SeriesError(f"{kind} values must be one dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise SeriesError(f"{kind} needs at least one value")
    arr.flags.writeable = False
    return arr


class MonthlySeries:
    """A contiguous run of monthly values starting at `start`.

    `unit` is one of index-points, persons, dimensionless-return or
    log-difference. Values must be finite, and persons-tagged values must be
    strictly positive. Instances compare equal on (start, unit, exact values).
    """

    __slots__ = ("_start", "_values", "_unit")

    def __init__(self, start: MonthKey, values: Sequence[float], unit: str):
        if unit not in MONTHLY_UNITS:
            raise SeriesError(f"unknown monthly unit {unit!r}, expected one of {sorted(MONTHLY_UNITS)}")
        arr = _freeze(values, unit, "monthly series")
        finite = np.isfinite(arr)
        if not finite.all():
            k = int(np.nonzero(~finite)[0][0])
            raise SeriesError(f"non-finite value at {start.plus(k)}")
        if unit == UNIT_PERSONS and (arr <= 0).any():
            k = int(np.nonzero(arr <= 0)[0][0])
            raise SeriesError(f"persons series must be strictly positive, got {arr[k]} at {start.plus(k)}")
        self._start = start
        self._values = arr
        self._unit = unit

    @property
    def start(self) -> MonthKey:
        return self._start

    @property
    def end(self) -> MonthKey:
        return self._start.plus(len(self._values) - 1)

    @property
    def values(self) -> np.ndarray:
        """Read-only view of the underlying float array."""
        return self._values

    @property
    def unit(self) -> str:
        return self._unit

    def __len__(self) -> int:
        return len(self._values)

    def month_at(self, i: int) -> MonthKey:
        if not 0 <= i < len(self._values):
            raise SeriesError(f"index {i} outside series of length {len(self._values)}")
        return self._start.plus(i)

    def index_of(self, month: MonthKey) -> int:
        i = month.diff(self._start)
        if not 0 <= i < len(self._values):
            raise SeriesError(f"{month} outside series range {self._start}..{self.end}")
        return i

    def value_at(self, month: MonthKey) -> float:
        return float(self._values[self.index_of(month)])

    def months(self) -> Iterator[MonthKey]:
        for i in range(len(self._values)):
            yield self._start.plus(i)

    def slice(self, first: MonthKey, last: MonthKey) -> "MonthlySeries":
        """Inclusive sub-series; both endpoints must lie inside the series."""
        if last < first:
            raise SeriesError(f"empty slice: {first}..{last}")
        a, b = self.index_of(first), self.index_of(last)
        return MonthlySeries(first, self._values[a : b + 1], self._unit)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        return (
            self._start == other._start
            and self._unit == other._unit
            and self._values.shape == other._values.shape
            and bool(np.all(self._values == other._values))
        )

    def __repr__(self) -> str:
        return f"MonthlySeries({self._start}..{self.end}, n={len(self._values)}, unit={self._unit})"


class QuarterlySeries:
    """A contiguous run of quarterly values; unit is growth-rate or level."""

    __slots__ = ("_start", "_values", "_unit")

    def __init__(self, start: QuarterKey, values: Sequence[float], unit: str):
        if unit not in QUARTERLY_UNITS:
            raise SeriesError(f"unknown quarterly unit {unit!r}, expected one of {sorted(QUARTERLY_UNITS)}")
        arr = _freeze(values, unit, "quarterly series")
        finite = np.isfinite(arr)
        if not finite.all():
            k = int(np.nonzero(~finite)[0][0])
            raise SeriesError(f"non-finite value at {start.plus(k)}")
        self._start = start
        self._values = arr
        self._unit = unit

    @property
    def start(self) -> QuarterKey:
        return self._start

    @property
    def end(self) -> QuarterKey:
        return self._start.plus(len(self._values) - 1)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def unit(self) -> str:
        return self._unit

    def __len__(self) -> int:
        return len(self._values)

    def quarter_at(self, i: int) -> QuarterKey:
        if not 0 <= i < len(self._values):
            raise SeriesError(f"index {i} outside series of length {len(self._values)}")
        return self._start.plus(i)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuarterlySeries):
            return NotImplemented
        return (
            self._start == other._start
            and self._unit == other._unit
            and self._values.shape == other._values.shape
            and bool(np.all(self._values == other._values))
        )

    def __repr__(self) -> str:
        return f"QuarterlySeries({self._start}..{self.end}, n={len(self._values)}, unit={self._unit})"


def _require_unit(series: MonthlySeries, unit: str, op: str) -> None:
    if series.unit != unit:
        raise SeriesError(f"{op} expects a {unit} series, got {series.unit}")


def _require_positive(series: MonthlySeries, op: str) -> None:
    bad = np.nonzero(series.values <= 0)[0]
    if bad.size:
        k = int(bad[0])
        raise SeriesError(f"{op} needs strictly positive values, got {series.values[k]} at {series.month_at(k)}")


def monthly_return(prices: MonthlySeries) -> MonthlySeries:
    """Arithmetic month-over-month returns P(t)/P(t-1) - 1 of an index series.

    The result starts one month after `prices` and is one element shorter.
    Returns are plain ratios, not log differences.
    """
    _require_unit(prices, UNIT_INDEX, "monthly_return")
    if len(prices) < 2:
        raise SeriesError(f"monthly_return needs at least 2 months, got {len(prices)}")
    _require_positive(prices, "monthly_return")
    v = prices.values
    out = v[1:] / v[:-1] - 1.0
    return MonthlySeries(prices.start.plus(1), out, UNIT_RETURN)


def cumulative_return_12m(monthly: MonthlySeries) -> MonthlySeries:
    """Sum of the last 12 monthly returns at each month.

    Output starts 11 months after the input start, so the first value covers
    exactly the first 12 input months.
    """
    _require_unit(monthly, UNIT_RETURN, "cumulative_return_12m")
    if len(monthly) < 12:
        raise SeriesError(f"cumulative_return_12m needs at least 12 months, got {len(monthly)}")
    windows = np.lib.stride_tricks.sliding_window_view(monthly.values, 12)
    return MonthlySeries(monthly.start.plus(11), windows.sum(axis=1), UNIT_RETURN)


def annual_ratio_return(prices: MonthlySeries) -> MonthlySeries:
    """Twelve-month ratio returns P(t)/P(t-12) - 1 of an index series."""
    _require_unit(prices, UNIT_INDEX, "annual_ratio_return")
    if len(prices) < 13:
        raise SeriesError(f"annual_ratio_return needs at least 13 months, got {len(prices)}")
    _require_positive(prices, "annual_ratio_return")
    v = prices.values
    out = v[12:] / v[:-12] - 1.0
    return MonthlySeries(prices.start.plus(12), out, UNIT_RETURN)


def dln(series: MonthlySeries) -> MonthlySeries:
    """First difference of ln(x): ln x(t) - ln x(t-1), tagged log-difference."""
    if len(series) < 2:
        raise SeriesError(f"dln needs at least 2 months, got {len(series)}")
    _require_positive(series, "dln")
    out = np.diff(np.log(series.values))
    return MonthlySeries(series.start.plus(1), out, UNIT_LOGDIFF)


def moving_average(series: MonthlySeries, window: int) -> MonthlySeries:
    """Trailing mean over `window` months; output starts window-1 months late."""
    if not isinstance(window, int) or window < 1:
        raise SeriesError(f"window must be a positive integer, got {window!r}")
    if window > len(series):
        raise SeriesError(f"window {window} exceeds series length {len(series)}")
    if window == 1:
        return MonthlySeries(series.start, series.values, series.unit)
    windows = np.lib.stride_tricks.sliding_window_view(series.values, window)
    return MonthlySeries(series.start.plus(window - 1), windows.mean(axis=1), series.unit)


def align(a: MonthlySeries, b: MonthlySeries) -> tuple[MonthlySeries, MonthlySeries]:
    """Trim both series to their common month range, preserving units.

    Raises when the ranges do not intersect.
    """
    first = max(a.start, b.start)
    last = min(a.end, b.end)
    if last < first:
        raise SeriesError(f"series do not overlap: {a.start}..{a.end} vs {b.start}..{b.end}")
    return a.slice(first, last), b.slice(first, last)


def quarterly_to_monthly(q: QuarterlySeries, method: str = "linear-in-log") -> MonthlySeries:
    """Bridge a quarterly series onto the monthly axis covering the same span.

    method "step" repeats each quarterly value over its three months, the
    right choice for rates that are constant within a quarter. method
    "linear-in-log" anchors ln(value) at each quarter's middle month and
    interpolates linearly between anchors (extending the edge slopes
    outward), which reproduces an exact exponential path from geometric
    quarterly growth. linear-in-log requires strictly positive values.

    Output unit: persons for level input, dimensionless-return for
    growth-rate input.
    """
    out_unit = UNIT_PERSONS if q.unit == UNIT_LEVEL else UNIT_RETURN
    n = len(q)
    start_month = q.start.first_month()
    if method == "step":
        return MonthlySeries(start_month, np.repeat(q.values, 3), out_unit)
    if method != "linear-in-log":
        raise SeriesError(f"unknown bridging method {method!r}, expected step or linear-in-log")
    bad = np.nonzero(q.values <= 0)[0]
    if bad.size:
        k = int(bad[0])
        raise SeriesError(f"linear-in-log needs strictly positive values, got {q.values[k]} at {q.quarter_at(k)}")
    logs = np.log(q.values)
    anchors = 3.0 * np.arange(n) + 1.0  # middle month of each quarter, 0-based offsets
    months = np.arange(3 * n, dtype=float)
    if n == 1:
        interp = np.full(3, logs[0])
    else:
        interp = np.interp(months, anchors, logs)
        # np.interp clamps outside the anchor range; extend the edge slopes instead.
        slope_lo = (logs[1] - logs[0]) / 3.0
        slope_hi = (logs[-1] - logs[-2]) / 3.0
        lo = months < anchors[0]
        hi = months > anchors[-1]
        interp[lo] = logs[0] + (months[lo] - anchors[0]) * slope_lo
        interp[hi] = logs[-1] + (months[hi] - anchors[-1]) * slope_hi
    return MonthlySeries(start_month, np.exp(interp), out_unit)
