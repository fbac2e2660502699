"""Task-worker matching: one worker drawn per subset from the score distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConstraintExhausted, DomainError
from .instance import BidProfile, Instance
from .scorefn import MatchingDistribution

DP_PURE = "dp_pure"
CONSTRAINED = "constrained"
CONSTRAINED_ATTEMPTS = 10_000


def to_mask(tasks: Iterable[int]) -> int:
    mask = 0
    for t in tasks:
        mask |= 1 << t
    return mask


@dataclass(frozen=True)
class MatchingPair:
    subset: int
    worker: int
    bid: float
    tasks: frozenset[int]
    mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mask", to_mask(self.tasks))

    @property
    def key(self) -> tuple[int, int]:
        """Tie-break key: lower worker id first, then lower subset index."""
        return (self.worker, self.subset)


@dataclass(frozen=True)
class MatchingSet:
    pairs: tuple[MatchingPair, ...]
    n: int

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, j: int) -> MatchingPair:
        return self.pairs[j]

    @property
    def workers(self) -> tuple[int, ...]:
        return tuple(p.worker for p in self.pairs)

    def with_bids(self, bids: BidProfile | Sequence[float]) -> "MatchingSet":
        """Same assignment, bid snapshots refreshed from ``bids``."""
        return MatchingSet(tuple(MatchingPair(p.subset, p.worker, float(bids[p.worker]), p.tasks)
                                 for p in self.pairs), self.n)

    def to_list(self) -> list[dict]:
        return [{"subset": p.subset, "worker": p.worker} for p in self.pairs]


def matching_from_workers(inst: Instance, workers: Sequence[int],
                          bids: BidProfile | Sequence[float] | None = None) -> MatchingSet:
    """Build the matching set that assigns ``workers[j]`` to subset ``j``."""
    if len(workers) != inst.l:
        raise DomainError(f"need {inst.l} assignments, got {len(workers)}")
    bids = inst.costs if bids is None else bids
    return MatchingSet(tuple(MatchingPair(j, int(i), float(bids[i]), inst.subsets[j])
                             for j, i in enumerate(workers)), inst.n)


def fixed_matching(inst: Instance, bids: BidProfile | Sequence[float] | None = None) -> MatchingSet:
    if inst.fixed_matching is None:
        raise DomainError("instance carries no fixed matching")
    by_subset = dict(inst.fixed_matching)
    return matching_from_workers(inst, [by_subset[j] for j in range(inst.l)], bids)


def distinct_workers_per_task(inst: Instance, workers: Sequence[int]) -> list[int]:
    seen: list[set[int]] = [set() for _ in range(inst.n)]
    for j, i in enumerate(workers):
        for t in inst.subsets[j]:
            seen[t].add(i)
    return [len(s) for s in seen]


def _draw(order: np.ndarray, cdf: np.ndarray, seed: int, attempt: int, l: int) -> list[int]:
    out = []
    for j in range(l):
        u = np.random.default_rng([seed, attempt, j]).random()
        idx = min(int(np.searchsorted(cdf, u, side="right")), len(order) - 1)
        out.append(int(order[idx]))
    return out


def match(inst: Instance, dist: MatchingDistribution, seed: int, mode: str = DP_PURE,
          bids: BidProfile | Sequence[float] | None = None) -> MatchingSet:
    """Sample one worker per subset, independently, from ``dist``.

    Inverse-CDF sampling with a private RNG stream per (seed, attempt,
    subset). The cumulative distribution runs over workers sorted by
    (bid, id), so two distributions over the same bids are monotonically
    coupled under a shared seed.

    ``constrained`` mode rejects whole matchings until every task is
    matched by at least two distinct workers; this conditions the
    distribution and voids the product form used by the privacy audit.
    """
    if mode not in (DP_PURE, CONSTRAINED):
        raise DomainError(f"unknown matching mode {mode!r}")
    bids = inst.costs if bids is None else bids
    m = inst.m
    if len(dist) != m:
        raise DomainError(f"distribution has {len(dist)} entries for {m} workers")
    order = np.array(sorted(range(m), key=lambda i: (bids[i], i)))
    cdf = np.cumsum(np.asarray(dist.probs)[order])
    cdf[-1] = 1.0

    if mode == DP_PURE:
        return matching_from_workers(inst, _draw(order, cdf, seed, 0, inst.l), bids)

    if m < 2:
        raise ConstraintExhausted("two distinct workers per task need at least two workers")
    for attempt in range(CONSTRAINED_ATTEMPTS):
        workers = _draw(order, cdf, seed, attempt, inst.l)
        if min(distinct_workers_per_task(inst, workers)) >= 2:
            return matching_from_workers(inst, workers, bids)
    raise ConstraintExhausted(f"no valid matching after {CONSTRAINED_ATTEMPTS} attempts")


def outcome_probability(outcome: MatchingSet | Sequence[int], dist: MatchingDistribution) -> float:
    """Exact probability of a matching outcome under independent draws."""
    workers = outcome.workers if isinstance(outcome, MatchingSet) else outcome
    logp = 0.0
    for i in workers:
        p = dist.probs[i]
        if p <= 0.0:
            return 0.0
        logp += math.log(p)
    return math.exp(logp)
