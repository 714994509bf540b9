"""Vocabulary and content similarity between sub-folksonomies.

Compares the supertagger and non-supertagger groups over tags or items:
usage distributions, top-N Spearman/cosine similarity curves with core-set
detection, and annotation-volume differences binned by an exogenous item
popularity signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .corpus import FolksonomyIndex
from .errors import DomainError, UndefinedCorrelationError
from .partition import Partition
from .stats import BinSpec, BinnedSeries, binned_mean, cosine, rank_descending

__all__ = [
    "CurvePoint",
    "FreqDist",
    "SimilarityCurve",
    "cosine_topn",
    "default_n_grid",
    "exogenous_popularity_diff",
    "freq_dist",
    "similarity_curve",
    "spearman_topn",
    "usage_distribution",
]

_DIMENSIONS = ("tag", "item")


@dataclass(frozen=True)
class FreqDist:
    """Annotation counts keyed by tag or item within one sub-folksonomy."""

    dimension: str
    counts: Mapping[str, int]


def freq_dist(index: FolksonomyIndex, users: Iterable[str], dimension: str) -> FreqDist:
    """Count annotations by the given users, keyed by tag or item."""
    if dimension not in _DIMENSIONS:
        raise DomainError(f"dimension must be one of {_DIMENSIONS}, got {dimension!r}")
    counts: dict[str, int] = {}
    for user in users:
        positions = index.by_user.get(user)
        if positions is None:
            raise DomainError(f"user {user!r} not in index")
        for pos in positions:
            a = index.annotations[pos]
            key = a.tag if dimension == "tag" else a.item
            counts[key] = counts.get(key, 0) + 1
    return FreqDist(dimension=dimension, counts=counts)


def usage_distribution(dist: FreqDist, cumulative: bool = False) -> list[tuple[int, float]]:
    """Share of a sub-folksonomy's annotations on keys of each popularity level.

    Non-cumulative: for each observed count N, the fraction of annotations
    falling on keys used exactly N times (fractions sum to 1). Cumulative:
    the fraction on keys used at least N times (series starts at 1).
    """
    if not dist.counts:
        raise DomainError("usage distribution of an empty dist")
    mass: dict[int, int] = {}
    for c in dist.counts.values():
        mass[c] = mass.get(c, 0) + c
    total = sum(mass.values())
    levels = sorted(mass)
    if not cumulative:
        return [(n, mass[n] / total) for n in levels]
    series = []
    remaining = total
    for n in levels:
        series.append((n, remaining / total))
        remaining -= mass[n]
    return series


def _sorted_keys(dist: FreqDist) -> list[str]:
    counts = dist.counts
    return sorted(counts, key=lambda k: (-counts[k], k))


def _top_n(dist: FreqDist, n: int) -> list[str]:
    return _sorted_keys(dist)[:n]


def _spearman_tops(
    top_a: Sequence[str],
    vals_a: Sequence[int],
    top_b: Sequence[str],
    vals_b: Sequence[int],
    n: int,
) -> float:
    union = sorted(set(top_a) | set(top_b))
    if len(union) < 2:
        raise UndefinedCorrelationError("top-N union has fewer than two keys")
    ranks_a = dict(zip(top_a, rank_descending(vals_a)))
    ranks_b = dict(zip(top_b, rank_descending(vals_b)))
    absent = float(n + 1)
    vec_a = np.array([ranks_a.get(k, absent) for k in union])
    vec_b = np.array([ranks_b.get(k, absent) for k in union])
    if np.ptp(vec_a) == 0.0 or np.ptp(vec_b) == 0.0:
        raise UndefinedCorrelationError("constant rank vector")
    if np.array_equal(vec_a, vec_b):
        return 1.0
    return float(np.corrcoef(vec_a, vec_b)[0, 1])


def _cosine_tops(
    top_a: Sequence[str],
    counts_a: Mapping[str, int],
    top_b: Sequence[str],
    counts_b: Mapping[str, int],
) -> float:
    set_a = set(top_a)
    set_b = set(top_b)
    union = sorted(set_a | set_b)
    vec_a = [counts_a[k] if k in set_a else 0 for k in union]
    vec_b = [counts_b[k] if k in set_b else 0 for k in union]
    return cosine(vec_a, vec_b)


def spearman_topn(dist_a: FreqDist, dist_b: FreqDist, n: int) -> float:
    """Rank correlation between the two top-N popularity rankings.

    Each side ranks its own top-N keys 1..N by count (average ranks on
    ties); keys in the union but absent from a side's top-N take rank N+1
    on that side.
    """
    if n < 1:
        raise DomainError(f"N must be >= 1, got {n}")
    top_a = _top_n(dist_a, n)
    top_b = _top_n(dist_b, n)
    return _spearman_tops(
        top_a,
        [dist_a.counts[k] for k in top_a],
        top_b,
        [dist_b.counts[k] for k in top_b],
        n,
    )


def cosine_topn(dist_a: FreqDist, dist_b: FreqDist, n: int) -> float:
    """Cosine similarity of raw-count top-N vectors over the union key set.

    Keys outside a side's top-N contribute zero on that side.
    """
    if n < 1:
        raise DomainError(f"N must be >= 1, got {n}")
    return _cosine_tops(_top_n(dist_a, n), dist_a.counts, _top_n(dist_b, n), dist_b.counts)


class CurvePoint(NamedTuple):
    n: int
    rho: float
    cosine: float
    coverage: float


@dataclass(frozen=True)
class SimilarityCurve:
    """Top-N similarity measures by N; core_size is the N where rho peaks."""

    dimension: str
    points: tuple[CurvePoint, ...]
    core_size: Optional[int]


def default_n_grid(max_n: int = 100_000) -> list[int]:
    """Every integer to 100, then ~20 log-spaced values per decade up to max_n."""
    grid = set(range(1, min(100, max_n) + 1))
    if max_n > 100:
        exponents = np.arange(2.0, math.log10(max_n) + 1e-9, 0.05)
        grid.update(int(round(10.0 ** e)) for e in exponents)
        grid.add(max_n)
    return sorted(v for v in grid if v <= max_n)


def similarity_curve(
    index: FolksonomyIndex,
    partition: Partition,
    dimension: str,
    n_values: Optional[Sequence[int]] = None,
) -> SimilarityCurve:
    """Spearman/cosine similarity between S and not-S as a function of top-N.

    Coverage at N is the share of all annotations (full folksonomy) whose
    key falls in the union of the two top-N sets. N values where the rank
    correlation is undefined are skipped. The core size is the smallest N
    attaining the maximum rho.
    """
    dist_s = freq_dist(index, partition.supertaggers, dimension)
    dist_o = freq_dist(index, partition.others, dimension)
    if not dist_s.counts or not dist_o.counts:
        raise DomainError("both sub-folksonomies must be non-empty")
    if n_values is None:
        n_values = default_n_grid()
    n_values = sorted(set(n_values))
    if any(n < 1 for n in n_values):
        raise DomainError("N values must be >= 1")

    full_counts: Mapping[str, tuple[int, ...]] = (
        index.by_tag if dimension == "tag" else index.by_item
    )
    total = index.n_annotations
    sorted_s = _sorted_keys(dist_s)
    sorted_o = _sorted_keys(dist_o)
    vals_s = np.array([dist_s.counts[k] for k in sorted_s], dtype=float)
    vals_o = np.array([dist_o.counts[k] for k in sorted_o], dtype=float)

    covered: set[str] = set()
    covered_annotations = 0
    prev_n = 0
    points: list[CurvePoint] = []
    for n in n_values:
        for key in sorted_s[prev_n:n]:
            if key not in covered:
                covered.add(key)
                covered_annotations += len(full_counts.get(key, ()))
        for key in sorted_o[prev_n:n]:
            if key not in covered:
                covered.add(key)
                covered_annotations += len(full_counts.get(key, ()))
        prev_n = n
        top_s = sorted_s[:n]
        top_o = sorted_o[:n]
        try:
            rho = _spearman_tops(top_s, vals_s[:n], top_o, vals_o[:n], n)
        except UndefinedCorrelationError:
            continue
        cos = _cosine_tops(top_s, dist_s.counts, top_o, dist_o.counts)
        points.append(CurvePoint(n, rho, cos, covered_annotations / total))

    core_size = None
    if points:
        best = max(p.rho for p in points)
        core_size = next(p.n for p in points if p.rho == best)
    return SimilarityCurve(dimension=dimension, points=tuple(points), core_size=core_size)


def exogenous_popularity_diff(
    index: FolksonomyIndex,
    partition: Partition,
    popularity: Mapping[str, float],
    spec: BinSpec,
) -> BinnedSeries:
    """Mean S-minus-not-S annotation count per item, binned by external popularity.

    Items lacking an external popularity value are excluded; the series
    reports the paired mean difference with its standard error per
    logarithmic popularity bin.
    """
    supertaggers = partition.supertaggers
    pairs = []
    for item, positions in index.by_item.items():
        pop = popularity.get(item)
        if pop is None:
            continue
        s_count = sum(1 for pos in positions if index.annotations[pos].user in supertaggers)
        o_count = len(positions) - s_count
        pairs.append((float(pop), float(s_count - o_count)))
    if not pairs:
        raise DomainError("no indexed item has an external popularity value")
    return binned_mean(pairs, spec)
