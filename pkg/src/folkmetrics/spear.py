"""SPEAR-style expertise scores per (user, tag).

A mutually reinforcing bipartite model: a user's expertise in a tag grows
with the quality of the items they apply it to, and item quality grows
with the expertise of the users tagging it. Earlier taggers of an item
earn more credit via C(x) = x**exponent over their discoverer position.
Per-tag scores are z-standardized and averaged per user to produce an
overall score.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .corpus import FolksonomyIndex
from .errors import DomainError, NotFoundError
from .stats import BinSpec, BinnedSeries, binned_mean, population_zscores

__all__ = [
    "CreditMatrix",
    "SpearResult",
    "credit_matrix",
    "eligible_tags",
    "spear_by_bin",
    "spear_scores",
    "standardize_and_average",
]

DEFAULT_TOP_K = 10_000
DEFAULT_MIN_USERS = 10
DEFAULT_EXPONENT = 0.5
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITER = 250


def eligible_tags(
    index: FolksonomyIndex,
    top_k: int = DEFAULT_TOP_K,
    min_users: int = DEFAULT_MIN_USERS,
) -> set[str]:
    """The top_k most-annotated tags having at least min_users distinct users."""
    ranked = sorted(index.by_tag, key=lambda t: (-len(index.by_tag[t]), t))[:top_k]
    eligible = set()
    for tag in ranked:
        users = {index.annotations[pos].user for pos in index.by_tag[tag]}
        if len(users) >= min_users:
            eligible.add(tag)
    return eligible


@dataclass(frozen=True)
class CreditMatrix:
    """Discoverer credit per (user, item) for one tag.

    credit = (1 + number of users tagging the item with this tag strictly
    later)**exponent; users sharing a timestamp do not count toward each
    other's "later" sets.
    """

    tag: str
    exponent: float
    entries: Mapping[tuple[str, str], float]


def credit_matrix(
    index: FolksonomyIndex, tag: str, exponent: float = DEFAULT_EXPONENT
) -> CreditMatrix:
    """Build the discoverer-credit matrix for one tag.

    Duplicate (user, item) applications of the tag collapse to the earliest
    timestamp before credits are assigned.
    """
    positions = index.by_tag.get(tag)
    if positions is None:
        raise NotFoundError(f"unknown tag: {tag!r}")
    earliest: dict[tuple[str, str], int] = {}
    for pos in positions:
        a = index.annotations[pos]
        key = (a.user, a.item)
        t = earliest.get(key)
        if t is None or a.time < t:
            earliest[key] = a.time

    by_item: dict[str, list[tuple[str, int]]] = {}
    for (user, item), t in earliest.items():
        by_item.setdefault(item, []).append((user, t))

    entries: dict[tuple[str, str], float] = {}
    for item, taggers in by_item.items():
        times = sorted(t for _, t in taggers)
        n = len(times)
        for user, t in taggers:
            later = n - bisect_right(times, t)
            entries[(user, item)] = float(1 + later) ** exponent
    return CreditMatrix(tag=tag, exponent=exponent, entries=entries)


@dataclass(frozen=True)
class SpearResult:
    """Fixed point of the mutual-reinforcement iteration for one tag."""

    tag: str
    user_scores: Mapping[str, float]
    item_scores: Mapping[str, float]
    iterations: int
    converged: bool


def spear_scores(
    credit: CreditMatrix,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SpearResult:
    """Alternate e <- C q and q <- C^T e with L1 normalization after each update.

    Starts from uniform vectors and stops when the largest user-score
    change drops below the tolerance; non-convergence within max_iter is
    reported via the converged flag, not raised.
    """
    if not credit.entries:
        raise DomainError("credit matrix is empty")
    users = sorted({u for u, _ in credit.entries})
    items = sorted({i for _, i in credit.entries})
    u_idx = {u: k for k, u in enumerate(users)}
    i_idx = {i: k for k, i in enumerate(items)}
    uu = np.empty(len(credit.entries), dtype=np.intp)
    ii = np.empty(len(credit.entries), dtype=np.intp)
    cc = np.empty(len(credit.entries), dtype=float)
    for k, ((user, item), value) in enumerate(credit.entries.items()):
        uu[k] = u_idx[user]
        ii[k] = i_idx[item]
        cc[k] = value
    # canonical accumulation order: scores stay bit-identical however the
    # entries mapping was assembled
    order = np.lexsort((ii, uu))
    uu, ii, cc = uu[order], ii[order], cc[order]

    e = np.full(len(users), 1.0 / len(users))
    q = np.full(len(items), 1.0 / len(items))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        e_new = np.bincount(uu, weights=cc * q[ii], minlength=len(users))
        e_new /= e_new.sum()
        q = np.bincount(ii, weights=cc * e_new[uu], minlength=len(items))
        q /= q.sum()
        delta = float(np.max(np.abs(e_new - e)))
        e = e_new
        if delta < tolerance:
            converged = True
            break
    return SpearResult(
        tag=credit.tag,
        user_scores=dict(zip(users, e.tolist())),
        item_scores=dict(zip(items, q.tolist())),
        iterations=iterations,
        converged=converged,
    )


def standardize_and_average(results: Iterable[SpearResult]) -> dict[str, float]:
    """Mean per-user z-score across tags.

    Each tag's user scores are z-transformed over that tag's scorers
    (population standard deviation; zero-variance tags contribute zeros),
    then averaged per user over the tags the user appears in.
    """
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for result in results:
        users = sorted(result.user_scores)
        z = population_zscores(np.array([result.user_scores[u] for u in users]))
        for user, zscore in zip(users, z.tolist()):
            sums[user] = sums.get(user, 0.0) + zscore
            counts[user] = counts.get(user, 0) + 1
    return {u: sums[u] / counts[u] for u in sums}


def spear_by_bin(
    index: FolksonomyIndex,
    spec: BinSpec,
    top_k: int = DEFAULT_TOP_K,
    min_users: int = DEFAULT_MIN_USERS,
    exponent: float = DEFAULT_EXPONENT,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> BinnedSeries:
    """Binned mean standardized score keyed by user total annotation count.

    Computed over the full folksonomy (not per group); raises if no tag
    passes the eligibility filter.
    """
    tags = eligible_tags(index, top_k=top_k, min_users=min_users)
    if not tags:
        raise DomainError("no eligible tags for expertise analysis")
    results = (
        spear_scores(credit_matrix(index, tag, exponent), tolerance, max_iter)
        for tag in sorted(tags)
    )
    mean_z = standardize_and_average(results)
    pairs = [
        (float(index.user_annotation_count[user]), score)
        for user, score in sorted(mean_z.items())
    ]
    return binned_mean(pairs, spec)
