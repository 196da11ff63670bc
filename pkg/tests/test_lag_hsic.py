import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tempest.hsic import hsic_stat, instantaneous_independence_test
from tempest.kernels import KernelSpec, gram
from tempest.lag_hsic import (LagHsicConfig, fit_gpd, gpd_tail_quantile, lag_hsic_test, shifted_series,
                              tail_quantile)
from tempest.results import order_statistic_threshold
from tempest.wild_bootstrap import BootstrapConfig

K1 = KernelSpec("gaussian", 1.0)


class TestShiftedSeries:
    X = np.arange(1.0, 6.0)
    Y = np.arange(11.0, 16.0)

    def test_zero(self):
        x, y = shifted_series(self.X, self.Y, 0)
        np.testing.assert_array_equal(x[:, 0], self.X)
        np.testing.assert_array_equal(y[:, 0], self.Y)

    def test_positive(self):
        x, y = shifted_series(self.X, self.Y, 2)
        np.testing.assert_array_equal(x[:, 0], [1, 2, 3])
        np.testing.assert_array_equal(y[:, 0], [13, 14, 15])

    def test_negative(self):
        x, y = shifted_series(self.X, self.Y, -1)
        np.testing.assert_array_equal(x[:, 0], [2, 3, 4, 5])
        np.testing.assert_array_equal(y[:, 0], [11, 12, 13, 14])

    def test_too_large(self):
        with pytest.raises(ValueError):
            shifted_series(self.X, self.Y, 3)


class TestConfig:
    def test_auto_radius(self):
        cfg = LagHsicConfig()
        assert cfg.radius(1000) == 10
        assert cfg.radius(10**6) == 14

    def test_level(self):
        assert LagHsicConfig(alpha=0.05).level(10) == pytest.approx(1 - 0.05 / 21)

    def test_radius_too_large(self):
        with pytest.raises(ValueError):
            LagHsicConfig(lags=10).radius(42)

    @pytest.mark.parametrize("kwargs", [dict(alpha=0.0), dict(lags=-1), dict(gpd_tail_fraction=0.5)])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            LagHsicConfig(**kwargs)

    def test_default_variant(self):
        assert LagHsicConfig().bootstrap.variant == "vb2"


class TestGpd:
    def test_exponential_quantile(self):
        x = np.random.default_rng(0).exponential(size=100_000)
        tq = tail_quantile(x, 0.999)
        assert tq.method == "gpd-mle"
        assert tq.value == pytest.approx(math.log(1000), rel=0.10)
        assert abs(tq.shape) < 0.05

    def test_bulk_falls_back(self):
        x = np.random.default_rng(1).normal(size=500)
        tq = tail_quantile(x, 0.8, tail_fraction=0.1)
        assert tq.method == "empirical"
        assert tq.value == order_statistic_threshold(x, 0.8)

    def test_few_samples_fall_back(self):
        x = np.random.default_rng(2).exponential(size=40)
        assert tail_quantile(x, 0.99).method == "empirical"

    def test_constant(self):
        assert gpd_tail_quantile(np.full(300, 2.5), 0.999) == 2.5

    def test_fit_recovers_pareto_shape(self):
        rng = np.random.default_rng(3)
        xi, beta = 0.3, 2.0
        y = beta / xi * (rng.uniform(size=20_000) ** -xi - 1)
        fxi, fbeta = fit_gpd(y)
        assert fxi == pytest.approx(xi, abs=0.05)
        assert fbeta == pytest.approx(beta, rel=0.05)

    def test_bounded_tail(self):
        # uniform exceedances have shape -1, below the search range; the estimate must stay finite
        x = np.random.default_rng(4).uniform(size=5000)
        v = gpd_tail_quantile(x, 0.999)
        assert 0.9 < v < 1.2

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.91, 0.9999))
    def test_above_empirical_threshold(self, seed, q):
        x = np.random.default_rng(seed).gamma(2.0, size=300)
        assert gpd_tail_quantile(x, q, 0.1) >= np.quantile(x, 0.9) - 1e-12


def small_case(seed=0, n=120):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=n)
    Y = np.roll(X, 3) + 0.5 * rng.normal(size=n)
    return X, Y


class TestLagHsic:
    def test_statistics_definition(self):
        X, Y = small_case()
        r = lag_hsic_test(X, Y, K1, K1, LagHsicConfig(lags=4, bootstrap=BootstrapConfig(num_replicates=60)))
        for m, s in zip(r.lags, r.statistics):
            x, y = shifted_series(X, Y, int(m))
            assert s == pytest.approx(len(x) * hsic_stat(gram(K1, x), gram(K1, y)), rel=1e-10)

    def test_detects_lag(self):
        X, Y = small_case(n=300)
        r = lag_hsic_test(X, Y, config=LagHsicConfig(lags=5))
        assert r.reject
        assert r.argmax_lag == 3
        assert r.reject == (r.statistic > r.threshold)

    def test_bonferroni_monotone(self):
        X, Y = small_case(1)
        thresholds = [lag_hsic_test(X, Y, K1, K1, LagHsicConfig(lags=M)).threshold for M in range(0, 15, 2)]
        assert all(a <= b + 1e-12 for a, b in zip(thresholds, thresholds[1:]))

    def test_reduces_to_instantaneous(self):
        for seed in range(5):
            X, Y = small_case(seed, n=80)
            Y = Y if seed % 2 else np.random.default_rng(seed).normal(size=80)
            bc = BootstrapConfig(num_replicates=99, seed=seed)
            lag = lag_hsic_test(X, Y, K1, K1, LagHsicConfig(lags=0, gpd_enabled=False, bootstrap=bc))
            inst = instantaneous_independence_test(X, Y, K1, K1, bc)
            assert lag.reject == inst.reject
            assert lag.threshold == inst.threshold

    def test_scaling_invariance(self):
        X, Y = small_case(2)
        r = lag_hsic_test(X, Y, K1, K1, LagHsicConfig(lags=6))
        c = 37.5
        scaled = tail_quantile(c * r.null_samples, r.level).value
        assert scaled == pytest.approx(c * r.threshold, rel=1e-6)
        assert (c * r.statistics.max() > scaled) == r.reject
        assert int(r.lags[np.argmax(c * r.statistics)]) == r.argmax_lag

    def test_gpd_threshold_above_bulk(self):
        X, Y = small_case(3, n=200)
        r = lag_hsic_test(X, Y, config=LagHsicConfig(lags=8))
        assert r.threshold >= np.quantile(r.null_samples, 0.9)

    def test_to_dict(self):
        X, Y = small_case(4)
        d = lag_hsic_test(X, Y, config=LagHsicConfig(lags=3, bootstrap=BootstrapConfig(num_replicates=50))).to_dict()
        assert d["method"] == "lag-hsic"
        assert len(d["lag_statistics"]) == 7
        assert d["statistic"] == max(d["lag_statistics"])

    def test_constant_series(self):
        Y = np.random.default_rng(5).normal(size=100)
        r = lag_hsic_test(np.zeros(100), Y, config=LagHsicConfig(lags=3))
        assert r.statistic == 0.0
        assert not r.reject
