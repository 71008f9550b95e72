"""Seeded synthetic fixtures generated from a declared ground-truth model.

The generator builds an age pyramid whose per-age exponential growth rates
differ, so the smoothed stand-in series has a non-degenerate change rate,
then constructs an index price path whose 12-month cumulative returns equal
A * rate + B plus optional Gaussian noise, exactly inverting the measurement
pipeline. A quarterly GDP growth series covering the same span rounds out
the set. Every downstream command is therefore testable end to end: with
zero noise a fit must recover (A, B) to float precision.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Union

import numpy as np

from .errors import SeriesError
from .ingest import write_gdp, write_index, write_population
from .population import AgePyramid, ProxySpec, n9_change_rate, synthesize_pyramid
from .series import UNIT_GROWTH, UNIT_INDEX, MonthKey, MonthlySeries, QuarterlySeries


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    start: MonthKey = MonthKey(1990, 4)
    months: int = 240
    age_lo: int = 0
    age_hi: int = 19
    truth_a: float = 170.0
    truth_b: float = -0.04
    return_noise_sd: float = 0.02
    count_noise_sd: float = 0.0
    index_base: float = 1000.0
    proxy: ProxySpec = ProxySpec(9, 2, 0, 1)
    # cohort-size wave shared by all ages; without it the band's change
    # rate is nearly constant and the slope would be barely identified
    wave_amp: float = 0.015
    wave_period: float = 48.0


@dataclass(frozen=True)
class SynthData:
    config: SynthConfig
    pyramid: AgePyramid
    prices: MonthlySeries
    gdp: QuarterlySeries


def growth_profile(ages: np.ndarray) -> np.ndarray:
    """Deterministic per-age monthly growth, centered so the default
    7..11 band grows about 0.02% per month."""
    return 0.0035 * np.sin(2.0 * np.pi * (ages - 9) / 13.0) + 0.0002


def base_profile(ages: np.ndarray) -> np.ndarray:
    return 400_000.0 + 15_000.0 * ages


def make_dataset(cfg: SynthConfig) -> SynthData:
    """Build the pyramid, index and GDP fixtures for one configuration."""
    if cfg.months < 40:
        raise SeriesError(f"need at least 40 months of pyramid data, got {cfg.months}")
    if cfg.age_hi < cfg.age_lo:
        raise SeriesError(f"empty age range {cfg.age_lo}..{cfg.age_hi}")
    if cfg.return_noise_sd < 0 or cfg.count_noise_sd < 0:
        raise SeriesError("noise levels must be >= 0")
    if cfg.wave_amp < 0 or cfg.wave_period <= 0:
        raise SeriesError("wave amplitude must be >= 0 and period positive")
    seeds = np.random.SeedSequence(cfg.seed).spawn(2)
    ages = np.arange(cfg.age_lo, cfg.age_hi + 1)
    grown = synthesize_pyramid(
        seeds[0], cfg.start, cfg.months, ages,
        base_profile(ages), growth_profile(ages), cfg.count_noise_sd,
    )
    # multiply in the cohort wave; a common phase factors through the band
    # mean, so the change-rate series inherits it exactly
    wave = np.exp(cfg.wave_amp * np.sin(2.0 * np.pi * np.arange(cfg.months) / cfg.wave_period))
    pyramid = AgePyramid(grown.start, grown.ages, grown.counts * wave[:, None], "synthetic")

    rate = n9_change_rate(pyramid, cfg.proxy)
    target = cfg.truth_a * rate.values + cfg.truth_b
    if cfg.return_noise_sd > 0:
        target = target + np.random.default_rng(seeds[1]).normal(0.0, cfg.return_noise_sd, len(target))

    # Invert the 12-month cumulative sum: seed the first window uniformly,
    # then roll the window forward one month at a time.
    r = np.empty(len(target) + 11)
    r[:12] = target[0] / 12.0
    for t in range(1, len(target)):
        r[t + 11] = target[t] - target[t - 1] + r[t - 1]
    if (r <= -0.9).any():
        raise SeriesError("ground-truth parameters produce implausible monthly returns below -90%")
    prices = np.empty(len(r) + 1)
    prices[0] = cfg.index_base
    prices[1:] = cfg.index_base * np.cumprod(1.0 + r)
    price_start = rate.start.plus(-12)
    price_series = MonthlySeries(price_start, prices, UNIT_INDEX)

    q_start = price_start.quarter
    n_quarters = price_series.end.quarter.diff(q_start) + 1
    k = np.arange(n_quarters)
    gdp = QuarterlySeries(q_start, 0.025 + 0.012 * np.sin(2.0 * np.pi * k / 10.0), UNIT_GROWTH)
    return SynthData(cfg, pyramid, price_series, gdp)


def write_dataset(data: SynthData, out_dir: Union[str, Path]) -> dict[str, Path]:
    """Write population.csv, index.csv, gdp.csv and truth.txt under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "population": out / "population.csv",
        "index": out / "index.csv",
        "gdp": out / "gdp.csv",
        "truth": out / "truth.txt",
    }
    write_population(data.pyramid, paths["population"])
    write_index(data.prices, "close", paths["index"])
    write_gdp(data.gdp, paths["gdp"])
    cfg = data.config
    truth_lines = [
        "# declared ground truth for this fixture set",
        f"seed = {cfg.seed}",
        f"start = {cfg.start}",
        f"months = {cfg.months}",
        f"ages = {cfg.age_lo}..{cfg.age_hi}",
        f"a = {cfg.truth_a!r}",
        f"b = {cfg.truth_b!r}",
        f"return_noise_sd = {cfg.return_noise_sd!r}",
        f"count_noise_sd = {cfg.count_noise_sd!r}",
        f"index_base = {cfg.index_base!r}",
        f"wave_amp = {cfg.wave_amp!r}",
        f"wave_period = {cfg.wave_period!r}",
        f"proxy_center_age = {cfg.proxy.center_age}",
        f"proxy_half_width = {cfg.proxy.half_width}",
        f"proxy_time_shift = {cfg.proxy.time_shift}",
        f"proxy_month_window = {cfg.proxy.month_window}",
    ]
    paths["truth"].write_text("\n".join(truth_lines) + "\n", encoding="utf-8")
    return paths


def config_from_options(seed: int, **overrides) -> SynthConfig:
    """SynthConfig from CLI-style overrides, ignoring unset (None) values."""
    clean = {k: v for k, v in overrides.items() if v is not None}
    return replace(SynthConfig(seed=seed), **clean)
