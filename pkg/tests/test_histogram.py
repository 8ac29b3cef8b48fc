"""Histogram tests: construction, inverse-transform sampling, cdf."""

import numpy as np
import pytest

from conftest import ks_critical, ks_two_sample
from pgnoise.errors import EmptyDataError, InvalidInputError
from pgnoise.histogram import (
    DEFAULT_BIN_COUNT,
    Histogram,
    build_histogram,
    cdf,
    sample_histogram,
)


class TestBuildHistogram:
    def test_two_bin_example(self):
        h = build_histogram([0.0, 1.0, 2.0, 3.0], bin_count=2)
        assert np.array_equal(h.edges, [0.0, 1.5, 3.0])
        assert np.array_equal(h.mass, [2.0, 2.0])
        assert h.bin_count == 2
        assert h.total == 4.0

    def test_default_bin_count(self):
        h = build_histogram(np.random.default_rng(0).random(500))
        assert h.bin_count == DEFAULT_BIN_COUNT == 64

    def test_constant_values_get_tiny_bin(self):
        h = build_histogram([2.5, 2.5, 2.5], bin_count=10)
        assert h.bin_count == 1
        assert h.edges[0] <= 2.5 <= h.edges[1]
        assert (h.edges[1] - h.edges[0]) <= 2.5 * 1e-6 * 1.001
        assert h.total == 3.0

    def test_zero_constant_gets_minimal_width(self):
        h = build_histogram([0.0, 0.0], bin_count=4)
        width = h.edges[-1] - h.edges[0]
        assert 0.0 < width <= 1e-11

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(EmptyDataError):
            build_histogram([], bin_count=4)
        with pytest.raises(InvalidInputError):
            build_histogram([0.0, np.nan], bin_count=4)
        with pytest.raises(InvalidInputError):
            build_histogram([0.0, 1.0], bin_count=0)

    def test_mass_counts_every_value(self):
        values = np.random.default_rng(3).normal(size=10_000)
        h = build_histogram(values, bin_count=32)
        assert h.total == values.size


class TestHistogramInvariants:
    def test_rejects_bad_edges(self):
        with pytest.raises(InvalidInputError):
            Histogram([0.0, 0.0, 1.0], [1.0, 1.0])
        with pytest.raises(InvalidInputError):
            Histogram([1.0, 0.0], [1.0])
        with pytest.raises(InvalidInputError):
            Histogram([0.0, np.inf], [1.0])

    def test_rejects_bad_mass(self):
        with pytest.raises(InvalidInputError):
            Histogram([0.0, 1.0], [-1.0])
        with pytest.raises(InvalidInputError):
            Histogram([0.0, 1.0], [0.0])
        with pytest.raises(InvalidInputError):
            Histogram([0.0, 1.0, 2.0], [1.0])

    def test_centers(self):
        h = Histogram([0.0, 1.0, 3.0], [1.0, 1.0])
        assert np.array_equal(h.centers, [0.5, 2.0])

    def test_read_only(self):
        h = Histogram([0.0, 1.0], [2.0])
        with pytest.raises(ValueError):
            h.edges[0] = -1.0
        with pytest.raises(ValueError):
            h.mass[0] = 5.0


class TestSampling:
    def test_samples_stay_inside_support(self):
        h = Histogram([-2.0, -1.0, 1.0, 4.0], [1.0, 5.0, 2.0])
        x = sample_histogram(h, np.random.default_rng(10), size=50_000)
        assert x.min() >= -2.0
        assert x.max() < 4.0

    def test_zero_mass_bins_never_sampled(self):
        h = Histogram([0.0, 1.0, 2.0, 3.0], [1.0, 0.0, 2.0])
        x = sample_histogram(h, np.random.default_rng(11), size=100_000)
        inside_dead_bin = (x > 1.0) & (x < 2.0)
        assert not inside_dead_bin.any()
        # mass ratio 1:2 between live bins
        frac = (x < 1.0).mean()
        assert abs(frac - 1.0 / 3.0) < 0.01

    def test_two_bin_occupancy(self):
        h = Histogram([0.0, 1.0, 2.0], [1.0, 1.0])
        x = sample_histogram(h, np.random.default_rng(12), size=40_000)
        frac = (x < 1.0).mean()
        assert abs(frac - 0.5) < 0.02

    def test_uniform_within_bin(self):
        h = Histogram([3.0, 5.0], [7.0])
        x = sample_histogram(h, np.random.default_rng(13), size=50_000)
        u = (x - 3.0) / 2.0
        grid = np.linspace(0.0, 1.0, 21)
        ecdf = np.searchsorted(np.sort(u), grid, side="right") / u.size
        assert np.abs(ecdf - grid).max() < 0.01

    def test_scalar_default(self):
        h = Histogram([0.0, 1.0], [1.0])
        x = sample_histogram(h, np.random.default_rng(14))
        assert np.isscalar(x) or np.ndim(x) == 0

    def test_point_mass_reproduction(self):
        value = 3.0e-3
        h = build_histogram([value], bin_count=1)
        x = sample_histogram(h, np.random.default_rng(15), size=1000)
        assert np.all(np.abs(x - value) <= abs(value) * 1.1e-6)

    def test_sampling_determinism(self):
        h = build_histogram(np.random.default_rng(1).normal(size=1000), 16)
        a = sample_histogram(h, np.random.default_rng(77), size=100)
        b = sample_histogram(h, np.random.default_rng(77), size=100)
        assert np.array_equal(a, b)

    def test_moment_recovery(self):
        rng = np.random.default_rng(16)
        values = rng.lognormal(mean=np.log(2e-4), sigma=0.3, size=100_000)
        h = build_histogram(values, bin_count=64)
        x = sample_histogram(h, np.random.default_rng(17), size=200_000)
        assert abs(x.mean() / values.mean() - 1.0) < 0.01
        assert abs(x.std() / values.std() - 1.0) < 0.03

    def test_ks_round_trip(self):
        rng = np.random.default_rng(18)
        values = rng.normal(2.0, 0.7, size=100_000)
        h = build_histogram(values, bin_count=128)
        x = sample_histogram(h, np.random.default_rng(19), size=100_000)
        d = ks_two_sample(x, values)
        assert d < ks_critical(x.size, values.size)


class TestCdf:
    def test_endpoints_and_midpoint(self):
        h = Histogram([0.0, 1.0, 2.0], [1.0, 3.0])
        assert cdf(h, -5.0) == 0.0
        assert cdf(h, 0.0) == 0.0
        assert cdf(h, 1.0) == 0.25
        assert cdf(h, 2.0) == 1.0
        assert cdf(h, 99.0) == 1.0
        assert cdf(h, 0.5) == pytest.approx(0.125)

    def test_vectorized_and_monotonic(self):
        values = np.random.default_rng(20).normal(size=5000)
        h = build_histogram(values, bin_count=32)
        grid = np.linspace(values.min() - 1, values.max() + 1, 300)
        c = cdf(h, grid)
        assert c.shape == grid.shape
        assert np.all(np.diff(c) >= 0.0)

    def test_probability_integral_transform(self):
        values = np.random.default_rng(21).gamma(3.0, 2.0, size=50_000)
        h = build_histogram(values, bin_count=64)
        x = sample_histogram(h, np.random.default_rng(22), size=50_000)
        u = cdf(h, x)
        grid = np.linspace(0.0, 1.0, 41)
        ecdf = np.searchsorted(np.sort(u), grid, side="right") / u.size
        assert np.abs(ecdf - grid).max() < 0.01
