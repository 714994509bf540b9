"""Per-item agreement between the supertagger and non-supertagger groups.

For every item tagged by both groups we score whether the groups agree on
the most popular tag and how similar the full tag distributions are
(cosine), then average both scores over logarithmically binned item
annotation counts. Per-item tag counts are distinct-user counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .corpus import FolksonomyIndex
from .errors import DomainError
from .partition import Partition
from .stats import BinSpec, BinnedSeries, binned_mean, cosine, log_bins

__all__ = [
    "BinSpec",
    "BinnedSeries",
    "ConsensusSeries",
    "TagDistribution",
    "consensus_by_bin",
    "item_cosine",
    "item_tag_distribution",
    "log_bins",
    "top_tag_match",
]


@dataclass(frozen=True)
class TagDistribution:
    """Distinct-user count per tag for one item within one group."""

    item: str
    counts: Mapping[str, int]


def item_tag_distribution(
    index: FolksonomyIndex, users: frozenset[str] | set[str], item: str
) -> Optional[TagDistribution]:
    """The item's tag distribution restricted to the given users, or None if untagged."""
    positions = index.by_item.get(item)
    if positions is None:
        return None
    seen: set[tuple[str, str]] = set()
    counts: dict[str, int] = {}
    for pos in positions:
        a = index.annotations[pos]
        if a.user not in users:
            continue
        pair = (a.tag, a.user)
        if pair not in seen:
            seen.add(pair)
            counts[a.tag] = counts.get(a.tag, 0) + 1
    if not counts:
        return None
    return TagDistribution(item=item, counts=counts)


def _top_tag(dist: TagDistribution) -> str:
    # lexicographically first among the most popular tags
    best = max(dist.counts.values())
    return min(t for t, c in dist.counts.items() if c == best)


def top_tag_match(
    s_dist: Optional[TagDistribution], o_dist: Optional[TagDistribution]
) -> Optional[bool]:
    """True iff both groups' most popular tag for the item coincides.

    Returns None (not applicable) when the item is untagged in either
    group; such items are excluded from averages.
    """
    if s_dist is None or o_dist is None or not s_dist.counts or not o_dist.counts:
        return None
    return _top_tag(s_dist) == _top_tag(o_dist)


def item_cosine(
    s_dist: Optional[TagDistribution], o_dist: Optional[TagDistribution]
) -> Optional[float]:
    """Cosine between the two groups' tag distributions over the union vocabulary."""
    if s_dist is None or o_dist is None or not s_dist.counts or not o_dist.counts:
        return None
    vocab = sorted(set(s_dist.counts) | set(o_dist.counts))
    return cosine(
        [s_dist.counts.get(t, 0) for t in vocab],
        [o_dist.counts.get(t, 0) for t in vocab],
    )


@dataclass(frozen=True)
class ConsensusSeries:
    """Binned top-tag match rate and mean per-item cosine over shared items."""

    top_match: BinnedSeries
    cosine: BinnedSeries
    shared_items: int


def consensus_by_bin(
    index: FolksonomyIndex, partition: Partition, spec: BinSpec
) -> ConsensusSeries:
    """Average both consensus scores over items binned by total annotation count.

    Each item tagged in both groups contributes one boolean (top-tag match)
    and one cosine to the bin of its total annotation count across the full
    folksonomy. Raises if no item is shared between the groups.
    """
    match_pairs: list[tuple[float, float]] = []
    cos_pairs: list[tuple[float, float]] = []
    for item, positions in index.by_item.items():
        s_dist = item_tag_distribution(index, partition.supertaggers, item)
        o_dist = item_tag_distribution(index, partition.others, item)
        match = top_tag_match(s_dist, o_dist)
        if match is None:
            continue
        key = float(len(positions))
        match_pairs.append((key, float(match)))
        cos_pairs.append((key, item_cosine(s_dist, o_dist)))
    if not match_pairs:
        raise DomainError("no item is tagged in both groups")
    return ConsensusSeries(
        top_match=binned_mean(match_pairs, spec),
        cosine=binned_mean(cos_pairs, spec),
        shared_items=len(match_pairs),
    )
