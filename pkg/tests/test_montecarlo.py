import math

import numpy as np
import pytest
from scipy.stats import ks_2samp, kstest

from rayprod import (
    ChannelConfig,
    Ecdf,
    ParameterError,
    closed_form_moment,
    load_samples,
    rayleigh_limit_distance,
    sample_frobenius,
    save_samples,
    variance_recursion,
)
from rayprod.montecarlo import _frobenius_values


class TestSampleFrobenius:
    def test_scalar_channel_is_exponential(self):
        samples = sample_frobenius(ChannelConfig((1, 1)), 10**6, 0)
        v = samples.values
        se = v.std(ddof=1) / math.sqrt(v.size)
        assert abs(v.mean() - 1.0) <= 4.0 * se
        assert kstest(v, "expon").pvalue > 0.001

    def test_moments_match_closed_form(self):
        for dims in [(2, 3, 4), (1, 5, 2, 3)]:
            config = ChannelConfig(dims)
            v = sample_frobenius(config, 10**6, 1).values
            for m in (1, 2, 3):
                powers = v**m
                se = powers.std(ddof=1) / math.sqrt(v.size)
                assert abs(powers.mean() - closed_form_moment(config, m)) <= 4.0 * se

    def test_deterministic(self):
        config = ChannelConfig((2, 3))
        a = sample_frobenius(config, 5000, 42)
        b = sample_frobenius(config, 5000, 42)
        assert np.array_equal(a.values, b.values)

    def test_partition_independent(self):
        # per-index counter streams: any split reproduces the full run
        config = ChannelConfig((2, 3, 4))
        whole = _frobenius_values(config, 0, 2000, 7)
        parts = np.concatenate(
            [
                _frobenius_values(config, 0, 123, 7),
                _frobenius_values(config, 123, 1500, 7),
                _frobenius_values(config, 1500, 2000, 7),
            ]
        )
        assert np.array_equal(whole, parts)

    def test_seeds_differ_but_agree_in_law(self):
        config = ChannelConfig((2, 3))
        a = sample_frobenius(config, 50_000, 0).values
        b = sample_frobenius(config, 50_000, 1).values
        assert not np.array_equal(a, b)
        assert ks_2samp(a, b).pvalue > 0.001

    def test_nonnegative(self):
        samples = sample_frobenius(ChannelConfig((3, 2, 5)), 10_000, 3)
        assert np.all(samples.values >= 0.0)

    def test_count_guard(self):
        with pytest.raises(ParameterError):
            sample_frobenius(ChannelConfig((2, 3)), 0, 0)


class TestEcdf:
    def test_basic_evaluation(self):
        e = Ecdf([1.0, 2.0, 3.0])
        assert e(2.0) == pytest.approx(2.0 / 3.0)
        assert e(0.5) == 0.0
        assert e(3.0) == 1.0
        assert e(99.0) == 1.0

    def test_vectorized(self):
        e = Ecdf([1.0, 2.0, 3.0])
        np.testing.assert_allclose(e(np.array([0.0, 1.0, 2.5])), [0.0, 1 / 3, 2 / 3])

    def test_empty(self):
        with pytest.raises(ParameterError):
            Ecdf([])


class TestVarianceRecursion:
    def test_single_factor(self):
        rows = variance_recursion(ChannelConfig((2, 3)))
        assert rows == [(1, 1.0, pytest.approx(1.0 / 6.0, rel=1e-14),
                         pytest.approx(1.0 / 6.0, rel=1e-14))]

    def test_increments_positive_and_mean_one(self):
        rows = variance_recursion(ChannelConfig((4, 8, 8, 8, 4)))
        assert [r[0] for r in rows] == [1, 2, 3, 4]
        assert all(r[1] == 1.0 for r in rows)
        assert all(r[3] > 0.0 for r in rows)
        assert all(b[2] > a[2] for a, b in zip(rows, rows[1:]))

    def test_matches_closed_form_moments(self):
        rng = np.random.default_rng(31)
        for _ in range(15):
            dims = tuple(int(k) for k in rng.integers(1, 9, size=rng.integers(2, 6)))
            config = ChannelConfig(dims)
            for n, _, variance, _ in variance_recursion(config):
                prefix = config.prefix(n)
                scale = prefix.dims[0] * prefix.normalization
                expected = closed_form_moment(prefix, 2) / scale**2 - 1.0
                assert variance == pytest.approx(expected, rel=1e-10)

    def test_prefix_guard(self):
        with pytest.raises(ParameterError):
            variance_recursion(ChannelConfig((2, 3)), upto_n=2)


class TestRayleighLimit:
    def test_more_scatterers_approach_single_factor_law(self):
        # normalized energy Y = X / (K0 N) of a [2, K1, K2, 4] channel
        # approaches the law of the 2x4 single-factor channel (Gamma with
        # shape 8, mean 1 after the same normalization) as the clusters grow
        from rayprod import reg_lower_gamma

        sups = {}
        for k1, k2 in [(6, 8), (30, 40)]:
            config = ChannelConfig((2, k1, k2, 4))
            samples = sample_frobenius(config, 2 * 10**5, 0)
            y = np.sort(samples.values / (2 * config.normalization))
            ref = reg_lower_gamma(8.0, 8.0 * y)
            ranks = np.arange(1, y.size + 1) / y.size
            sups[(k1, k2)] = float(np.max(np.abs(ref - ranks)))
        assert sups[(30, 40)] < sups[(6, 8)]

    def test_no_cluster_is_gaussian(self):
        # without clusters the entries are exactly Gaussian: the distance is
        # pure KS sampling noise (99% null quantile 1.63 / sqrt(N))
        count = 10**4
        for seed in (0, 1):
            d = rayleigh_limit_distance(3, 4, 5, [], count, seed)
            assert d <= 1.63 / math.sqrt(2 * 3 * 4 * count)

    def test_distance_shrinks_with_scatterers(self):
        d10 = rayleigh_limit_distance(2, 4, 10, [1.0, 4.0 / 3.0], 10**4, 10)
        d100 = rayleigh_limit_distance(2, 4, 100, [1.0, 4.0 / 3.0], 10**4, 10)
        assert d100 < d10

    def test_deterministic(self):
        a = rayleigh_limit_distance(2, 3, 7, [1.0], 2000, 5)
        b = rayleigh_limit_distance(2, 3, 7, [1.0], 2000, 5)
        assert a == b

    def test_domain(self):
        with pytest.raises(ParameterError):
            rayleigh_limit_distance(0, 4, 10, [1.0], 100, 0)
        with pytest.raises(ParameterError):
            rayleigh_limit_distance(2, 4, 10, [0.0], 100, 0)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        config = ChannelConfig((2, 3, 4))
        samples = sample_frobenius(config, 1234, 99)
        path = tmp_path / "draws.bin"
        save_samples(samples, path)
        assert path.stat().st_size == 32 + 8 * 1234
        loaded = load_samples(path, config)
        assert loaded.count == 1234
        assert loaded.seed == 99
        assert np.array_equal(loaded.values, samples.values)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"x" * 64)
        with pytest.raises(ParameterError):
            load_samples(path, ChannelConfig((2, 3)))

    def test_truncated(self, tmp_path):
        config = ChannelConfig((2, 3))
        samples = sample_frobenius(config, 100, 0)
        path = tmp_path / "draws.bin"
        save_samples(samples, path)
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(ParameterError):
            load_samples(path, config)
