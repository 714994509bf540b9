"""Deterministic statistics kernel shared by all analyses.

Provides Spearman rank correlation with average-rank tie handling, cosine
similarity, lower-median / nearest-rank quartiles, and the logarithmic
binning reduction used by every "as a function of annotation count" series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import DomainError, UndefinedCorrelationError

__all__ = [
    "BinRow",
    "BinSpec",
    "BinnedSeries",
    "MedianIQR",
    "binned_mean",
    "cosine",
    "log_bins",
    "median_iqr",
    "population_zscores",
    "rank_descending",
    "spearman",
]


def rank_descending(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Rank values so that the largest gets rank 1, averaging ties."""
    return rankdata(np.negative(np.asarray(values, dtype=float)), method="average")


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    sx = math.sqrt(float(xd @ xd))
    sy = math.sqrt(float(yd @ yd))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for constant input")
    return float(xd @ yd) / (sx * sy)


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman's rho: Pearson correlation of average-tie ranks.

    Raises UndefinedCorrelationError if the vectors are shorter than two
    elements or either is constant.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape:
        raise DomainError(f"length mismatch: {xa.shape} vs {ya.shape}")
    if xa.size < 2:
        raise UndefinedCorrelationError("need at least two points")
    return _pearson(rankdata(xa, method="average"), rankdata(ya, method="average"))


def cosine(x: Sequence[float], y: Sequence[float]) -> float:
    """Cosine of the angle between two vectors, dot(x,y)/(|x||y|)."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape:
        raise DomainError(f"length mismatch: {xa.shape} vs {ya.shape}")
    nx = math.sqrt(float(xa @ xa))
    ny = math.sqrt(float(ya @ ya))
    if nx == 0.0 or ny == 0.0:
        raise DomainError("cosine undefined for a zero vector")
    return float(xa @ ya) / (nx * ny)


class MedianIQR(NamedTuple):
    median: float
    q25: float
    q75: float


def _nearest_rank(sorted_values: Sequence[float], pct: float) -> float:
    n = len(sorted_values)
    idx = max(math.ceil(pct / 100.0 * n), 1) - 1
    return sorted_values[idx]


def median_iqr(values: Iterable[float]) -> MedianIQR:
    """Lower median plus nearest-rank 25th/75th percentiles."""
    s = sorted(values)
    if not s:
        raise DomainError("median of empty sequence")
    return MedianIQR(s[(len(s) - 1) // 2], _nearest_rank(s, 25), _nearest_rank(s, 75))


@dataclass(frozen=True)
class BinSpec:
    """Logarithmic bin layout: edges at base**i for i = 0, step, ..., max_exponent."""

    base: float = 2.0
    exponent_step: float = 0.1
    max_exponent: float = 14.0

    def __post_init__(self) -> None:
        if self.base <= 1.0:
            raise DomainError(f"bin base must exceed 1, got {self.base}")
        if not 0.0 < self.exponent_step <= self.max_exponent:
            raise DomainError(
                f"need 0 < step <= max exponent, got step={self.exponent_step} "
                f"max={self.max_exponent}"
            )


def log_bins(spec: BinSpec) -> np.ndarray:
    """Bin edges base**(k*step) for k = 0..floor(max_exponent/step)."""
    n_steps = math.floor(spec.max_exponent / spec.exponent_step + 1e-9)
    exponents = spec.exponent_step * np.arange(n_steps + 1)
    return np.asarray(spec.base, dtype=float) ** exponents


class BinRow(NamedTuple):
    bin_low: float
    bin_high: float
    mean: float
    stderr: float
    n: int


@dataclass(frozen=True)
class BinnedSeries:
    """Per-bin mean/stderr rows; empty bins are omitted."""

    rows: tuple[BinRow, ...]

    @property
    def total_count(self) -> int:
        return sum(row.n for row in self.rows)


def _stderr(values: np.ndarray) -> float:
    if values.size <= 1:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


def binned_mean(pairs: Iterable[tuple[float, float]], spec: BinSpec) -> BinnedSeries:
    """Group (key, value) pairs into the spec's log bins and average per bin.

    Keys below the first edge share an implicit [min, first_edge) bin and keys
    at or above the last edge an implicit [last_edge, inf) bin, so every input
    pair lands in exactly one bin.
    """
    edges = log_bins(spec)
    keys_values = list(pairs)
    if not keys_values:
        return BinnedSeries(rows=())
    keys = np.array([k for k, _ in keys_values], dtype=float)
    values = np.array([v for _, v in keys_values], dtype=float)
    # index -1 -> underflow, len(edges)-1 -> overflow
    idx = np.searchsorted(edges, keys, side="right") - 1

    rows = []
    for bin_idx in np.unique(idx):
        in_bin = values[idx == bin_idx]
        if bin_idx < 0:
            low, high = float(keys[idx == bin_idx].min()), float(edges[0])
        elif bin_idx == len(edges) - 1:
            low, high = float(edges[-1]), math.inf
        else:
            low, high = float(edges[bin_idx]), float(edges[bin_idx + 1])
        rows.append(BinRow(low, high, float(in_bin.mean()), _stderr(in_bin), int(in_bin.size)))
    return BinnedSeries(rows=tuple(rows))


def population_zscores(values: np.ndarray) -> np.ndarray:
    """Z-transform with population standard deviation; constant input maps to zeros."""
    mu = values.mean()
    sigma = values.std(ddof=0)
    if sigma == 0.0:
        return np.zeros_like(values)
    return (values - mu) / sigma
