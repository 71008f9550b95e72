"""Age pyramids and the young-age predictor series derived from them.

An AgePyramid holds monthly single-year-of-age counts. The model's predictor
is the change rate of a smoothed count series: a mean over adjacent ages,
optionally a trailing mean over adjacent months, relocated along the time
axis so that a younger (or older) cohort stands in for the target age.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import SeriesError
from .series import UNIT_PERSONS, MonthKey, MonthlySeries, dln, moving_average

VINTAGES = frozenset({"postcensal", "intercensal", "synthetic"})


class AgePyramid:
    """Monthly population counts by single year of age.

    counts has shape (n_months, n_ages), is strictly positive and finite, and
    is frozen after construction. `ages` must be a contiguous ascending range.
    """

    __slots__ = ("_start", "_ages", "_counts", "_vintage")

    def __init__(self, start: MonthKey, ages: Sequence[int], counts, vintage: str):
        if vintage not in VINTAGES:
            raise SeriesError(f"unknown vintage {vintage!r}, expected one of {sorted(VINTAGES)}")
        ages = tuple(int(a) for a in ages)
        if len(ages) < 1:
            raise SeriesError("pyramid needs at least one age")
        if any(b - a != 1 for a, b in zip(ages, ages[1:])):
            raise SeriesError(f"ages must be contiguous ascending, got {ages}")
        arr = np.array(counts, dtype=float)
        if arr.ndim != 2:
            raise SeriesError(f"counts must be 2-dimensional (months x ages), got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise SeriesError("pyramid needs at least one month")
        if arr.shape[1] != len(ages):
            raise SeriesError(f"counts have {arr.shape[1]} age columns but {len(ages)} ages were given")
        if not np.isfinite(arr).all():
            m, a = map(int, np.argwhere(~np.isfinite(arr))[0])
            raise SeriesError(f"non-finite count at {start.plus(m)} age {ages[a]}")
        if (arr <= 0).any():
            m, a = map(int, np.argwhere(arr <= 0)[0])
            raise SeriesError(f"counts must be strictly positive, got {arr[m, a]} at {start.plus(m)} age {ages[a]}")
        arr.flags.writeable = False
        self._start = start
        self._ages = ages
        self._counts = arr
        self._vintage = vintage

    @property
    def start(self) -> MonthKey:
        return self._start

    @property
    def end(self) -> MonthKey:
        return self._start.plus(self._counts.shape[0] - 1)

    @property
    def n_months(self) -> int:
        return self._counts.shape[0]

    @property
    def ages(self) -> tuple[int, ...]:
        return self._ages

    @property
    def counts(self) -> np.ndarray:
        return self._counts

    @property
    def vintage(self) -> str:
        return self._vintage

    def age_index(self, age: int) -> int:
        if age not in self._ages:
            raise SeriesError(f"age {age} outside pyramid ages {self._ages[0]}..{self._ages[-1]}")
        return age - self._ages[0]

    def __repr__(self) -> str:
        return (
            f"AgePyramid({self._start}..{self.end}, ages {self._ages[0]}..{self._ages[-1]}, "
            f"vintage={self._vintage})"
        )


@dataclass(frozen=True)
class ProxySpec:
    """How to build the target-age count series from a pyramid.

    center_age and half_width select the age band [center-hw, center+hw]
    whose counts are averaged each month. month_window applies a trailing
    mean over that many months. time_shift relocates the finished series
    along the month axis: +24 makes 7-year-olds stand in for 9-year-olds
    two years later, -96 moves 17-year-olds eight years back.
    """

    center_age: int
    half_width: int = 2
    time_shift: int = 0
    month_window: int = 1

    def __post_init__(self) -> None:
        if self.half_width < 0:
            raise SeriesError(f"half_width must be >= 0, got {self.half_width}")
        if self.month_window < 1:
            raise SeriesError(f"month_window must be >= 1, got {self.month_window}")

    def describe(self) -> str:
        return (
            f"ages {self.center_age - self.half_width}..{self.center_age + self.half_width}, "
            f"window {self.month_window}m, shift {self.time_shift:+d}m"
        )


def extract_age(p: AgePyramid, age: int) -> MonthlySeries:
    """The raw monthly count series for one age."""
    return MonthlySeries(p.start, p.counts[:, p.age_index(age)], UNIT_PERSONS)


def smoothed_n9(p: AgePyramid, spec: ProxySpec) -> MonthlySeries:
    """Smoothed stand-in count series for the target age.

    Per month, the mean count over ages [center-hw, center+hw]; then a
    trailing mean over month_window months; then the whole series is shifted
    time_shift months along the calendar axis. The value reported for month m
    therefore equals the unshifted value at m - time_shift.
    """
    lo, hi = spec.center_age - spec.half_width, spec.center_age + spec.half_width
    if lo < p.ages[0] or hi > p.ages[-1]:
        raise SeriesError(
            f"age band {lo}..{hi} outside pyramid ages {p.ages[0]}..{p.ages[-1]}"
        )
    a, b = p.age_index(lo), p.age_index(hi)
    band = p.counts[:, a : b + 1].mean(axis=1)
    series = MonthlySeries(p.start, band, UNIT_PERSONS)
    if spec.month_window > len(series):
        raise SeriesError(f"month_window {spec.month_window} exceeds {len(series)} available months")
    series = moving_average(series, spec.month_window)
    if len(series) < 2:
        raise SeriesError(f"smoothed series has {len(series)} months, need at least 2")
    return MonthlySeries(series.start.plus(spec.time_shift), series.values, UNIT_PERSONS)


def n9_change_rate(p: AgePyramid, spec: ProxySpec) -> MonthlySeries:
    """Month-over-month log change of the smoothed stand-in series."""
    return dln(smoothed_n9(p, spec))


def _census_vector(p: AgePyramid, census: Mapping[int, float], label: str) -> np.ndarray:
    out = np.empty(len(p.ages))
    for i, age in enumerate(p.ages):
        if age not in census:
            raise SeriesError(f"{label} census is missing age {age}")
        c = float(census[age])
        if not np.isfinite(c) or c <= 0:
            raise SeriesError(f"{label} census count for age {age} must be positive, got {c}")
        out[i] = c
    return out


def intercensalize(p: AgePyramid, census_start: Mapping[int, float], census_end: Mapping[int, float]) -> AgePyramid:
    """Redistribute each age's error of closure geometrically across the decade.

    The postcensal pyramid must be anchored on the start census: its first
    month's counts equal census_start. With e = census_end / last postcensal
    count, month k of K (1-based over the pyramid's K months) is scaled by
    e**(k/K), so the last month matches census_end exactly and the correction
    grows geometrically from a negligible first-month factor e**(1/K).
    """
    if p.vintage != "postcensal":
        raise SeriesError(f"intercensalize expects a postcensal pyramid, got {p.vintage}")
    start_ref = _census_vector(p, census_start, "start")
    end_ref = _census_vector(p, census_end, "end")
    first = p.counts[0]
    off = np.nonzero(np.abs(first - start_ref) > 1e-9 * start_ref)[0]
    if off.size:
        a = int(off[0])
        raise SeriesError(
            f"misaligned endpoints: first-month count {first[a]} for age {p.ages[a]} "
            f"does not match start census {start_ref[a]}"
        )
    K = p.n_months
    e = end_ref / p.counts[-1]
    k = np.arange(1, K + 1, dtype=float)[:, None]
    adjusted = p.counts * np.power(e[None, :], k / K)
    return AgePyramid(p.start, p.ages, adjusted, "intercensal")


def synthesize_pyramid(
    seed: int,
    start: MonthKey,
    n_months: int,
    ages: Sequence[int],
    base_counts,
    monthly_growth,
    noise_sd: float = 0.0,
) -> AgePyramid:
    """Deterministic synthetic pyramid: per-age exponential growth plus noise.

    count(k, a) = base_a * exp(growth_a * k) * exp(eps), eps ~ N(0, noise_sd^2)
    drawn from numpy's default_rng(seed). base_counts and monthly_growth may
    be scalars or one value per age. noise_sd = 0 gives a formula-exact
    pyramid and the same seed always reproduces the same counts.
    """
    ages = tuple(int(a) for a in ages)
    if n_months < 1:
        raise SeriesError(f"n_months must be >= 1, got {n_months}")
    if noise_sd < 0:
        raise SeriesError(f"noise_sd must be >= 0, got {noise_sd}")
    base = np.broadcast_to(np.asarray(base_counts, dtype=float), (len(ages),)).copy()
    growth = np.broadcast_to(np.asarray(monthly_growth, dtype=float), (len(ages),)).copy()
    if (base <= 0).any() or not np.isfinite(base).all():
        raise SeriesError("base_counts must be strictly positive and finite")
    if not np.isfinite(growth).all():
        raise SeriesError("monthly_growth must be finite")
    k = np.arange(n_months, dtype=float)[:, None]
    counts = base[None, :] * np.exp(growth[None, :] * k)
    if noise_sd > 0:
        rng = np.random.default_rng(seed)
        counts = counts * np.exp(rng.normal(0.0, noise_sd, size=counts.shape))
    return AgePyramid(start, ages, counts, "synthetic")
