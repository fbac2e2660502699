"""Exact minimum-cost cover over matching pairs and its expectation over arrivals.

The optimum for a requested multiset ``A`` only has to cover the distinct
tasks of ``A``, so the search runs over a bitmask of those tasks alone and
its size is governed by ``k`` rather than by ``n``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import DomainError, EnumTooLarge, SizeLimit, Uncoverable
from .matching import MatchingSet

log = logging.getLogger(__name__)

ENUM_CAP = 10**6
BRUTE_FORCE_MAX_PAIRS = 20
EXACT = "exact"
MONTE_CARLO = "mc"
AUTO = "auto"


@dataclass(frozen=True)
class ArrivalModel:
    """``k`` tasks drawn i.i.d. uniformly from ``n`` (a multiset)."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise DomainError(f"need k >= 1 and n >= 1, got k={self.k}, n={self.n}")

    @property
    def multiset_count(self) -> int:
        return math.comb(self.n + self.k - 1, self.k)

    def multisets(self):
        """Yield ``(multiset, probability)`` over all unordered draws."""
        k, n = self.k, self.n
        norm = n ** k
        fk = math.factorial(k)
        for combo in itertools.combinations_with_replacement(range(n), k):
            ways = fk
            for _, grp in itertools.groupby(combo):
                ways //= math.factorial(len(list(grp)))
            yield combo, ways / norm


@dataclass(frozen=True)
class OracleResult:
    cost: float
    cover: tuple[int, ...]


@dataclass(frozen=True)
class OptExpectation:
    value: float
    mode: str
    samples: int
    stderr: float = 0.0

    def __float__(self) -> float:
        return self.value


def _restrict(P: MatchingSet, tasks: list[int]) -> tuple[list[int], list[float], int]:
    masks = []
    if len(tasks) <= 8:
        # few requested tasks: probe each pair's bitmask instead of walking its subset
        for p in P.pairs:
            masks.append(sum(1 << i for i, t in enumerate(tasks) if p.mask >> t & 1))
    else:
        bit = {t: 1 << i for i, t in enumerate(tasks)}
        for p in P.pairs:
            rm = 0
            for t in p.tasks:
                rm |= bit.get(t, 0)
            masks.append(rm)
    return masks, [p.bid for p in P.pairs], (1 << len(tasks)) - 1


def min_cover_cost(P: MatchingSet, A: Iterable[int]) -> OracleResult:
    """Cheapest sub-collection of ``P`` covering the distinct tasks of ``A``.

    Memoised branch-and-bound: branch on the uncovered task with the
    fewest covering pairs; prune a branch when its bid plus the cheapest
    single-pair bound of what remains cannot beat the incumbent.
    """
    tasks = sorted(set(A))
    if not tasks:
        return OracleResult(0.0, ())
    masks, bids, full = _restrict(P, tasks)

    union = 0
    for rm in masks:
        union |= rm
    if union != full:
        missing = [t for i, t in enumerate(tasks) if not union >> i & 1]
        raise Uncoverable(f"tasks {missing} are in no matched subset")

    # drop pairs dominated by a no-more-expensive pair covering a superset
    live = [i for i, rm in enumerate(masks) if rm]
    live.sort(key=lambda i: (bids[i], i))
    kept: list[int] = []
    for i in live:
        if not any(masks[i] | masks[q] == masks[q] for q in kept):
            kept.append(i)

    nbits = len(tasks)
    covering = [[i for i in kept if masks[i] >> b & 1] for b in range(nbits)]
    cheapest = [bids[c[0]] for c in covering]

    def lower_bound(rem: int) -> float:
        lb = 0.0
        while rem:
            low = rem & -rem
            lb = max(lb, cheapest[low.bit_length() - 1])
            rem ^= low
        return lb

    @lru_cache(maxsize=None)
    def solve(rem: int) -> tuple[float, tuple[int, ...]]:
        if rem == 0:
            return 0.0, ()
        branch = min((b for b in range(nbits) if rem >> b & 1), key=lambda b: len(covering[b]))
        best, best_cover = math.inf, ()
        for i in covering[branch]:
            child = rem & ~masks[i]
            if bids[i] + lower_bound(child) >= best:
                continue
            sub, sub_cover = solve(child)
            if bids[i] + sub < best:
                best, best_cover = bids[i] + sub, (i,) + sub_cover
        return best, best_cover

    _, cover = solve(full)
    cover = tuple(sorted(cover))
    return OracleResult(math.fsum(bids[i] for i in cover), cover)


def brute_force_min_cover(P: MatchingSet, A: Iterable[int]) -> float:
    """Exhaustive check over all ``2^|P|`` sub-collections (vectorised)."""
    if len(P) > BRUTE_FORCE_MAX_PAIRS:
        raise SizeLimit(f"{len(P)} pairs exceeds the brute-force limit of {BRUTE_FORCE_MAX_PAIRS}")
    tasks = sorted(set(A))
    if not tasks:
        return 0.0
    if len(tasks) > 62:
        raise SizeLimit("brute force supports at most 62 distinct requested tasks")
    masks, bids, full = _restrict(P, tasks)
    unions = np.zeros(1, dtype=np.int64)
    costs = np.zeros(1, dtype=float)
    for rm, b in zip(masks, bids):
        unions = np.concatenate([unions, unions | rm])
        costs = np.concatenate([costs, costs + b])
    feasible = np.flatnonzero(unions == full)
    if feasible.size == 0:
        raise Uncoverable("requested tasks cannot be covered by the matching set")
    best = int(feasible[np.argmin(costs[feasible])])
    return math.fsum(bids[i] for i in range(len(bids)) if best >> i & 1)


def expected_opt_cost(P: MatchingSet, arrivals: ArrivalModel | int, mode: str = EXACT,
                      samples: int = 10_000, seed: int = 0) -> OptExpectation:
    """Expected optimal cover cost over ``k`` uniformly arriving tasks.

    ``exact`` enumerates unordered multisets with multinomial weights;
    ``mc`` averages ``samples`` i.i.d. draws; ``auto`` picks exact when the
    multiset count is within the enumeration cap.
    """
    if isinstance(arrivals, int):
        arrivals = ArrivalModel(arrivals, P.n)
    if arrivals.n != P.n:
        raise DomainError("arrival model and matching set disagree on n")
    if mode == AUTO:
        mode = EXACT if arrivals.multiset_count <= ENUM_CAP else MONTE_CARLO
        if mode == MONTE_CARLO:
            log.warning("exact enumeration over %d multisets exceeds cap; using Monte Carlo",
                        arrivals.multiset_count)

    cache: dict[frozenset[int], float] = {}

    def cost_of(draw) -> float:
        key = frozenset(draw)
        if key not in cache:
            cache[key] = min_cover_cost(P, key).cost
        return cache[key]

    if mode == EXACT:
        if arrivals.multiset_count > ENUM_CAP:
            raise EnumTooLarge(f"{arrivals.multiset_count} multisets exceeds cap {ENUM_CAP}")
        terms = [w * cost_of(ms) for ms, w in arrivals.multisets()]
        return OptExpectation(math.fsum(terms), EXACT, arrivals.multiset_count)
    if mode == MONTE_CARLO:
        if samples < 2:
            raise DomainError("Monte Carlo needs at least two samples")
        draws = np.sort(np.random.default_rng(seed).integers(arrivals.n, size=(samples, arrivals.k)), axis=1)
        unique, inverse = np.unique(draws, axis=0, return_inverse=True)
        values = np.array([cost_of(row.tolist()) for row in unique])[inverse.reshape(-1)]
        return OptExpectation(float(values.mean()), MONTE_CARLO, samples,
                              float(values.std(ddof=1) / math.sqrt(samples)))
    raise DomainError(f"unknown oracle mode {mode!r}")
