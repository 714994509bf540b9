"""Statistics kernel tests against brute-force definitions."""

import math

import numpy as np
import pytest

from folkmetrics.errors import DomainError, UndefinedCorrelationError
from folkmetrics.stats import (
    BinSpec,
    binned_mean,
    cosine,
    log_bins,
    median_iqr,
    population_zscores,
    rank_descending,
    spearman,
)


def brute_force_ranks(x):
    """Average-tie ranks by counting: 1 + #smaller + #equal/2 (excluding self)."""
    x = list(x)
    ranks = []
    for xi in x:
        smaller = sum(1 for xj in x if xj < xi)
        equal = sum(1 for xj in x if xj == xi)
        ranks.append(smaller + (equal + 1) / 2.0)
    return ranks


def brute_force_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    dx = math.sqrt(sum((a - mx) ** 2 for a in x))
    dy = math.sqrt(sum((b - my) ** 2 for b in y))
    return num / (dx * dy)


class TestSpearman:
    def test_identity(self):
        assert spearman([1, 2, 3, 4], [1, 2, 3, 4]) == pytest.approx(1.0)

    def test_reversal(self):
        assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)

    def test_matches_definition_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(3, 51))
            x = rng.integers(0, 10, size=n).astype(float)
            y = rng.integers(0, 10, size=n).astype(float)
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            expected = brute_force_pearson(brute_force_ranks(x), brute_force_ranks(y))
            assert spearman(x, y) == pytest.approx(expected, abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=40)
        y = rng.normal(size=40)
        base = spearman(x, y)
        assert spearman(np.exp(x), y) == pytest.approx(base, abs=1e-12)
        assert spearman(x, 3 * y + 7) == pytest.approx(base, abs=1e-12)

    def test_constant_vector_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            spearman([1, 1, 1], [1, 2, 3])

    def test_too_short_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            spearman([1], [2])


class TestCosine:
    def test_identical(self):
        assert cosine([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1, 0], [0, 1]) == pytest.approx(0.0)

    def test_matches_direct_evaluation(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            x = rng.random(10)
            y = rng.random(10)
            expected = float(np.dot(x, y) / (np.linalg.norm(x) * np.linalg.norm(y)))
            got = cosine(x, y)
            assert got == pytest.approx(expected, abs=1e-12)
            assert 0.0 <= got <= 1.0

    def test_zero_vector_raises(self):
        with pytest.raises(DomainError):
            cosine([0, 0], [1, 2])


class TestRankDescending:
    def test_basic(self):
        assert rank_descending([5, 3, 3, 2]).tolist() == [1.0, 2.5, 2.5, 4.0]


class TestMedianIQR:
    def test_odd(self):
        assert median_iqr([1, 2, 3]) == (2, 1, 3)

    def test_singleton(self):
        assert median_iqr([7]) == (7, 7, 7)

    def test_lower_median_even(self):
        assert median_iqr([1, 2, 3, 4]).median == 2

    def test_matches_sort_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            vals = rng.integers(0, 100, size=int(rng.integers(1, 30))).tolist()
            s = sorted(vals)
            n = len(s)
            got = median_iqr(vals)
            assert got.median == s[(n - 1) // 2]
            assert got.q25 == s[max(math.ceil(0.25 * n), 1) - 1]
            assert got.q75 == s[max(math.ceil(0.75 * n), 1) - 1]


class TestLogBins:
    def test_powers_of_two(self):
        spec = BinSpec(base=2.0, exponent_step=1.0, max_exponent=3.0)
        assert log_bins(spec).tolist() == [1.0, 2.0, 4.0, 8.0]

    def test_single_bin_when_step_equals_max(self):
        spec = BinSpec(base=2.0, exponent_step=5.0, max_exponent=5.0)
        assert log_bins(spec).tolist() == [1.0, 32.0]

    def test_default_spec_membership_of_five(self):
        # log2(5) ~= 2.3219 -> bin [2**2.3, 2**2.4)
        edges = log_bins(BinSpec())
        idx = np.searchsorted(edges, 5.0, side="right") - 1
        assert edges[idx] == pytest.approx(2 ** 2.3)
        assert edges[idx + 1] == pytest.approx(2 ** 2.4)

    def test_invalid_spec(self):
        with pytest.raises(DomainError):
            BinSpec(base=1.0)
        with pytest.raises(DomainError):
            BinSpec(exponent_step=0.0)


class TestBinnedMean:
    def test_single_bin_mean(self):
        spec = BinSpec(base=2.0, exponent_step=10.0, max_exponent=10.0)
        series = binned_mean([(2.0, 1.0), (3.0, 2.0), (5.0, 6.0)], spec)
        assert len(series.rows) == 1
        assert series.rows[0].mean == pytest.approx(3.0)
        assert series.rows[0].n == 3

    def test_singleton_bins_have_zero_stderr(self):
        spec = BinSpec(base=2.0, exponent_step=1.0, max_exponent=4.0)
        series = binned_mean([(1.0, 5.0), (4.0, 2.0)], spec)
        assert all(row.stderr == 0.0 for row in series.rows)
        assert all(row.n == 1 for row in series.rows)

    def test_matches_grouping_oracle(self):
        rng = np.random.default_rng(13)
        spec = BinSpec(base=2.0, exponent_step=0.5, max_exponent=6.0)
        edges = log_bins(spec)
        keys = rng.uniform(0.5, 200.0, size=300)
        values = rng.normal(size=300)
        series = binned_mean(zip(keys, values), spec)

        groups = {}
        for k, v in zip(keys, values):
            idx = int(np.searchsorted(edges, k, side="right")) - 1
            groups.setdefault(idx, []).append(v)
        assert len(series.rows) == len(groups)
        assert series.total_count == 300
        by_low = {row.bin_low: row for row in series.rows}
        for idx, vals in groups.items():
            if idx < 0:
                low = min(k for k in keys if k < edges[0])
            elif idx == len(edges) - 1:
                low = float(edges[-1])
            else:
                low = float(edges[idx])
            row = by_low[low]
            assert row.mean == pytest.approx(np.mean(vals))
            expected_err = 0.0 if len(vals) == 1 else np.std(vals, ddof=1) / math.sqrt(len(vals))
            assert row.stderr == pytest.approx(expected_err)
            assert row.n == len(vals)

    def test_bins_contiguous_and_sorted(self):
        rng = np.random.default_rng(17)
        series = binned_mean(
            [(float(k), 1.0) for k in rng.integers(1, 10_000, size=500)], BinSpec()
        )
        lows = [row.bin_low for row in series.rows]
        assert lows == sorted(lows)
        for a, b in zip(series.rows, series.rows[1:]):
            assert a.bin_high <= b.bin_low or a.bin_high == b.bin_low

    def test_empty_input(self):
        assert binned_mean([], BinSpec()).rows == ()


class TestPopulationZscores:
    def test_two_point(self):
        z = population_zscores(np.array([1.0, 3.0]))
        assert z.tolist() == [-1.0, 1.0]

    def test_constant_maps_to_zero(self):
        assert population_zscores(np.array([4.0, 4.0, 4.0])).tolist() == [0.0, 0.0, 0.0]

    def test_mean_zero_std_one(self):
        rng = np.random.default_rng(23)
        z = population_zscores(rng.random(100))
        assert abs(z.mean()) < 1e-9
        assert abs(z.std(ddof=0) - 1.0) < 1e-9
