"""Categorizer/describer motivation metrics per user.

Three per-user measures: tags per post (mean distinct tags per tagged
item), tag-resource ratio (vocabulary size over items tagged), and the
orphan ratio (share of a user's vocabulary that is seldom used). All three
are computed over distinct (item, tag) pairs, so duplicate annotations of
the same triple do not change them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import FolksonomyIndex
from .errors import NotFoundError
from .stats import BinSpec, BinnedSeries, binned_mean

__all__ = [
    "MotivationScores",
    "MotivationSeries",
    "motivation_by_bin",
    "orphan_ratio",
    "tpp",
    "trr",
    "user_motivation",
]

DEFAULT_ORPHAN_DIVISOR = 100


@dataclass(frozen=True)
class MotivationScores:
    user: str
    tpp: float
    trr: float
    orphan_ratio: float


def _user_profile(index: FolksonomyIndex, user: str):
    """Distinct (item, tag) pairs, item set, and per-tag distinct-item usage."""
    positions = index.by_user.get(user)
    if positions is None:
        raise NotFoundError(f"unknown user: {user!r}")
    pairs: set[tuple[str, str]] = set()
    items: set[str] = set()
    usage: dict[str, set[str]] = {}
    for pos in positions:
        a = index.annotations[pos]
        pairs.add((a.item, a.tag))
        items.add(a.item)
        usage.setdefault(a.tag, set()).add(a.item)
    return pairs, items, usage


def tpp(index: FolksonomyIndex, user: str) -> float:
    """Tags per post: distinct (item, tag) pairs over distinct items tagged."""
    pairs, items, _ = _user_profile(index, user)
    return len(pairs) / len(items)


def trr(index: FolksonomyIndex, user: str) -> float:
    """Tag-resource ratio: vocabulary size over distinct items tagged."""
    _, items, usage = _user_profile(index, user)
    return len(usage) / len(items)


def _orphan_share(sizes: list[int], divisor: int) -> float:
    # max usage within the divisor -> every tag is seldom-used by definition
    top = max(sizes)
    if top <= divisor:
        return 1.0
    threshold = math.ceil(top / divisor)
    return sum(1 for s in sizes if s <= threshold) / len(sizes)


def orphan_ratio(
    index: FolksonomyIndex, user: str, divisor: int = DEFAULT_ORPHAN_DIVISOR
) -> float:
    """Share of the user's vocabulary used at most n* times.

    Per-tag usage is the number of distinct items the user applied the tag
    to; the orphan threshold is n* = ceil(max usage / divisor). A
    vocabulary whose most-used tag covers at most divisor items is all
    orphans (OR = 1).
    """
    _, _, usage = _user_profile(index, user)
    return _orphan_share([len(items) for items in usage.values()], divisor)


def user_motivation(
    index: FolksonomyIndex, user: str, divisor: int = DEFAULT_ORPHAN_DIVISOR
) -> MotivationScores:
    """All three motivation scores for one user in a single pass."""
    pairs, items, usage = _user_profile(index, user)
    return MotivationScores(
        user=user,
        tpp=len(pairs) / len(items),
        trr=len(usage) / len(items),
        orphan_ratio=_orphan_share([len(i) for i in usage.values()], divisor),
    )


@dataclass(frozen=True)
class MotivationSeries:
    tpp: BinnedSeries
    trr: BinnedSeries
    orphan_ratio: BinnedSeries


def motivation_by_bin(
    index: FolksonomyIndex, spec: BinSpec, divisor: int = DEFAULT_ORPHAN_DIVISOR
) -> MotivationSeries:
    """Binned mean/stderr of TPP, TRR, and OR keyed by user annotation count."""
    tpp_pairs = []
    trr_pairs = []
    orphan_pairs = []
    for user in index.by_user:
        scores = user_motivation(index, user, divisor)
        key = float(index.user_annotation_count[user])
        tpp_pairs.append((key, scores.tpp))
        trr_pairs.append((key, scores.trr))
        orphan_pairs.append((key, scores.orphan_ratio))
    return MotivationSeries(
        tpp=binned_mean(tpp_pairs, spec),
        trr=binned_mean(trr_pairs, spec),
        orphan_ratio=binned_mean(orphan_pairs, spec),
    )
