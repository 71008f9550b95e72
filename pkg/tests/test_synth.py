"""Synthetic fixture generator: declared truth, exact inversion, determinism."""
from __future__ import annotations

import numpy as np
import pytest

from demotrend import MonthKey, ProxySpec, SeriesError, align, fit, measured_returns, n9_change_rate
from demotrend.ingest import load_gdp, load_index, load_population
from demotrend.synth import SynthConfig, config_from_options, make_dataset, write_dataset

M = MonthKey


class TestMakeDataset:
    def test_noiseless_target_is_exactly_affine(self):
        data = make_dataset(SynthConfig(seed=1, return_noise_sd=0.0))
        rate = n9_change_rate(data.pyramid, data.config.proxy)
        measured = measured_returns(data.prices)
        m, r = align(measured, rate)
        np.testing.assert_allclose(m.values, 170.0 * r.values - 0.04, atol=1e-12)

    def test_noiseless_fit_recovers_declared_truth(self):
        data = make_dataset(SynthConfig(seed=2, return_noise_sd=0.0))
        out = fit(measured_returns(data.prices), n9_change_rate(data.pyramid, data.config.proxy))
        assert abs(out.a - 170.0) <= 1e-9 * 170.0
        assert abs(out.b + 0.04) <= 1e-9
        assert out.rms <= 1e-12

    def test_custom_truth_is_honored(self):
        cfg = SynthConfig(seed=3, truth_a=35.0, truth_b=0.089, return_noise_sd=0.0, proxy=ProxySpec(17, 0, -96, 4), age_hi=19)
        data = make_dataset(cfg)
        out = fit(measured_returns(data.prices), n9_change_rate(data.pyramid, cfg.proxy))
        assert abs(out.a - 35.0) <= 1e-6
        assert abs(out.b - 0.089) <= 1e-9

    def test_same_seed_reproduces_everything(self):
        a = make_dataset(SynthConfig(seed=11))
        b = make_dataset(SynthConfig(seed=11))
        np.testing.assert_array_equal(a.pyramid.counts, b.pyramid.counts)
        np.testing.assert_array_equal(a.prices.values, b.prices.values)
        np.testing.assert_array_equal(a.gdp.values, b.gdp.values)

    def test_change_rate_has_usable_variation(self):
        # The fit can only identify the slope if the generated change rate
        # actually moves; guard the generator against a flat predictor.
        for seed in range(5):
            data = make_dataset(SynthConfig(seed=seed, return_noise_sd=0.0))
            rate = n9_change_rate(data.pyramid, data.config.proxy)
            assert rate.values.std() >= 5e-4

    def test_prices_lead_the_rate_axis_by_a_year(self):
        data = make_dataset(SynthConfig(seed=4))
        rate = n9_change_rate(data.pyramid, data.config.proxy)
        assert data.prices.start == rate.start.plus(-12)
        measured = measured_returns(data.prices)
        assert measured.start == rate.start

    def test_gdp_covers_the_price_range(self):
        data = make_dataset(SynthConfig(seed=5))
        assert data.gdp.start.first_month() <= data.prices.start
        assert data.gdp.end.first_month().plus(2) >= data.prices.end

    def test_config_validation(self):
        with pytest.raises(SeriesError, match="40"):
            make_dataset(SynthConfig(seed=0, months=30))
        with pytest.raises(SeriesError):
            make_dataset(SynthConfig(seed=0, return_noise_sd=-0.1))
        with pytest.raises(SeriesError):
            make_dataset(SynthConfig(seed=0, wave_period=0.0))
        with pytest.raises(SeriesError):
            make_dataset(SynthConfig(seed=0, age_lo=9, age_hi=5))


class TestWriteDataset:
    def test_same_seed_writes_identical_bytes(self, tmp_path):
        pa = write_dataset(make_dataset(SynthConfig(seed=21)), tmp_path / "a")
        pb = write_dataset(make_dataset(SynthConfig(seed=21)), tmp_path / "b")
        assert pa.keys() == pb.keys()
        for key in pa:
            assert pa[key].read_bytes() == pb[key].read_bytes(), key

    def test_files_load_back_losslessly(self, tmp_path):
        data = make_dataset(SynthConfig(seed=22, count_noise_sd=0.0002))
        paths = write_dataset(data, tmp_path)
        pyramid = load_population(paths["population"])
        np.testing.assert_array_equal(pyramid.counts, data.pyramid.counts)
        idx = load_index(paths["index"])
        np.testing.assert_array_equal(idx.series.values, data.prices.values)
        assert idx.convention == "close"
        gdp = load_gdp(paths["gdp"])
        np.testing.assert_array_equal(gdp.values, data.gdp.values)

    def test_truth_file_declares_the_generator_settings(self, tmp_path):
        cfg = SynthConfig(seed=23, truth_a=30.0, truth_b=-0.1, proxy=ProxySpec(3, 2, 72, 1))
        paths = write_dataset(make_dataset(cfg), tmp_path)
        text = paths["truth"].read_text()
        assert "a = 30.0" in text
        assert "b = -0.1" in text
        assert "seed = 23" in text
        assert "proxy_time_shift = 72" in text


class TestConfigFromOptions:
    def test_none_overrides_are_ignored(self):
        cfg = config_from_options(9, months=None, truth_a=None)
        assert cfg == SynthConfig(seed=9)

    def test_set_overrides_apply(self):
        cfg = config_from_options(9, months=120, truth_a=30.0, start=M(2000, 1))
        assert cfg.months == 120
        assert cfg.truth_a == 30.0
        assert cfg.start == M(2000, 1)
        assert cfg.truth_b == SynthConfig(seed=9).truth_b

    def test_unknown_override_rejected(self):
        with pytest.raises(TypeError):
            config_from_options(9, wavelength=3)
