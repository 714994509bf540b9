"""Consensus-based expertise: does a user's tag choice match the crowd?

Each annotation is scored by its tag's popularity on the item relative to
the item's most popular tag; a user's score is the weighted mean over
items, weighting by the log of how much tagging the item received from
other users. Tag popularity F is the distinct-user count per (item, tag),
so timestamps and duplicate applications are irrelevant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .corpus import FolksonomyIndex
from .errors import NotFoundError
from .stats import BinSpec, BinnedSeries, binned_mean

__all__ = [
    "AnnotationScore",
    "annotation_score",
    "annotation_weight",
    "consensus_expertise_by_bin",
    "user_annotation_scores",
    "user_consensus_expertise",
]


@dataclass(frozen=True)
class AnnotationScore:
    user: str
    item: str
    tag: str
    e: float
    weight: float


class _ItemStats:
    """Per-item tag frequencies F, their max, and the item's total F mass."""

    __slots__ = ("freq", "max_freq", "total")

    def __init__(self, freq: dict[str, int]):
        self.freq = freq
        self.max_freq = max(freq.values())
        self.total = sum(freq.values())


def _item_stats(index: FolksonomyIndex, raw_counts: bool = False) -> dict[str, _ItemStats]:
    per_item: dict[str, dict[str, int]] = {}
    if raw_counts:
        for item, positions in index.by_item.items():
            freq: dict[str, int] = {}
            for pos in positions:
                tag = index.annotations[pos].tag
                freq[tag] = freq.get(tag, 0) + 1
            per_item[item] = freq
    else:
        for (item, tag), count in index.item_tag_freq.items():
            per_item.setdefault(item, {})[tag] = count
    return {item: _ItemStats(freq) for item, freq in per_item.items()}


def _user_items(index: FolksonomyIndex, user: str) -> dict[str, list[str]]:
    """The user's raw tag applications grouped by item."""
    positions = index.by_user.get(user)
    if positions is None:
        raise NotFoundError(f"unknown user: {user!r}")
    items: dict[str, list[str]] = {}
    for pos in positions:
        a = index.annotations[pos]
        items.setdefault(a.item, []).append(a.tag)
    return items


def _score(stats: _ItemStats, tag: str) -> float:
    f = stats.freq[tag]
    if f == stats.max_freq:
        return 1.0
    return (f - 1) / stats.max_freq


def _weight(stats: _ItemStats, own: int) -> Optional[float]:
    # others' share of the item's tagging; 0 others -> item excluded
    argument = stats.total - own
    if argument <= 0:
        return None
    return math.log10(argument)


def annotation_score(index: FolksonomyIndex, user: str, item: str, tag: str) -> float:
    """Consensus score of one annotation, in [0, 1].

    A tag tied for most popular on the item scores exactly 1; otherwise the
    score is (F(tag, item) - 1) / max_x F(x, item), discounting the scoring
    user's own contribution from the numerator only.
    """
    user_items = _user_items(index, user)
    if item not in user_items or tag not in set(user_items[item]):
        raise NotFoundError(f"no annotation ({user!r}, {item!r}, {tag!r})")
    stats = _item_stats_for(index, item)
    return _score(stats, tag)


def _item_stats_for(index: FolksonomyIndex, item: str) -> _ItemStats:
    positions = index.by_item.get(item)
    if positions is None:
        raise NotFoundError(f"unknown item: {item!r}")
    seen: set[tuple[str, str]] = set()
    freq: dict[str, int] = {}
    for pos in positions:
        a = index.annotations[pos]
        pair = (a.tag, a.user)
        if pair not in seen:
            seen.add(pair)
            freq[a.tag] = freq.get(a.tag, 0) + 1
    return _ItemStats(freq)


def annotation_weight(index: FolksonomyIndex, user: str, item: str) -> Optional[float]:
    """log10 of the item's tagging volume excluding the user's own share.

    Returns 0.0 when exactly one outside annotation exists and None when
    there are none at all (the item is excluded from the user's mean).
    """
    user_items = _user_items(index, user)
    if item not in user_items:
        raise NotFoundError(f"user {user!r} did not tag item {item!r}")
    stats = _item_stats_for(index, item)
    return _weight(stats, own=len(set(user_items[item])))


def _user_score(
    user_items: dict[str, list[str]],
    stats_by_item: Mapping[str, _ItemStats],
    raw_counts: bool = False,
) -> Optional[float]:
    weighted = 0.0
    weight_sum = 0.0
    defined = False
    for item, tag_list in user_items.items():
        stats = stats_by_item[item]
        tags = set(tag_list)
        own = len(tag_list) if raw_counts else len(tags)
        w = _weight(stats, own=own)
        if w is None:
            continue
        defined = True
        best = max(_score(stats, tag) for tag in tags)
        weighted += best * w
        weight_sum += w
    if not defined or weight_sum == 0.0:
        return None
    return weighted / weight_sum


def user_annotation_scores(index: FolksonomyIndex, user: str) -> list[AnnotationScore]:
    """Score and weight for each of the user's distinct (item, tag) pairs."""
    user_items = _user_items(index, user)
    stats_by_item = _item_stats(index)
    rows = []
    for item in sorted(user_items):
        stats = stats_by_item[item]
        tags = set(user_items[item])
        w = _weight(stats, own=len(tags))
        for tag in sorted(tags):
            rows.append(
                AnnotationScore(user, item, tag, _score(stats, tag), w if w is not None else 0.0)
            )
    return rows


def user_consensus_expertise(index: FolksonomyIndex, user: str) -> Optional[float]:
    """Weighted mean consensus score over the user's items, or None if undefined.

    Per item only the user's best-scoring tag counts; items with no outside
    tagging are excluded, and a user whose every item is excluded (or whose
    retained weights are all zero) has no defined score.
    """
    return _user_score(_user_items(index, user), _item_stats(index))


def consensus_expertise_by_bin(
    index: FolksonomyIndex, spec: BinSpec, raw_counts: bool = False
) -> BinnedSeries:
    """Binned mean user expertise keyed by user total annotation count.

    Users without a defined score are omitted. raw_counts switches the
    frequency view from distinct users to raw annotation counts (both F and
    the user's own deduction) for sensitivity checks.
    """
    stats_by_item = _item_stats(index, raw_counts=raw_counts)
    pairs = []
    for user in index.by_user:
        score = _user_score(_user_items(index, user), stats_by_item, raw_counts=raw_counts)
        if score is None:
            continue
        pairs.append((float(index.user_annotation_count[user]), score))
    return binned_mean(pairs, spec)
