"""Replaced-set payments and the resulting worker utilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import Irreplaceable
from .instance import BidProfile, Instance
from .matching import MatchingPair, MatchingSet
from .selection import WinningPair, WinningSet, cost_effectiveness


@dataclass(frozen=True)
class PairPayment:
    winner: WinningPair
    replaced: tuple[MatchingPair, ...]
    replaced_cost: float
    contribution: float


@dataclass(frozen=True)
class PaymentProfile:
    payments: tuple[float, ...]
    breakdown: tuple[PairPayment, ...]

    @property
    def total(self) -> float:
        return math.fsum(self.payments)


@dataclass(frozen=True)
class UtilityProfile:
    utilities: tuple[float, ...]

    def __getitem__(self, i: int) -> float:
        return self.utilities[i]


def replaced_set(P: MatchingSet, winner: WinningPair | MatchingPair) -> tuple[tuple[MatchingPair, ...], float]:
    """Greedy min-CF re-cover of the winner's subset by other workers' pairs.

    The copy set starts as the winner's whole subset. Every pair held by
    the winner's own worker is excluded; CF is recomputed against the
    shrinking copy set each iteration.
    """
    pair = winner.pair if isinstance(winner, WinningPair) else winner
    copy = pair.mask
    candidates = [p for p in P.pairs if p.worker != pair.worker and p.mask & copy]
    chosen: list[MatchingPair] = []
    while copy:
        live = [p for p in candidates if p.mask & copy]
        if not live:
            raise Irreplaceable(f"subset {pair.subset} of worker {pair.worker} cannot be re-covered")
        best = min(live, key=lambda p: (cost_effectiveness(p, copy), p.key))
        chosen.append(best)
        candidates.remove(best)
        copy &= ~best.mask
    return tuple(chosen), math.fsum(p.bid for p in chosen)


def determine_payments(P: MatchingSet, S: WinningSet, bids: BidProfile | Sequence[float]) -> PaymentProfile:
    """Pay each winning pair ``max(bid, replaced-set total)``, summed per worker."""
    payments = [0.0] * len(bids)
    rows = []
    for w in S:
        R, p_R = replaced_set(P, w)
        contribution = max(bids[w.worker], p_R)
        payments[w.worker] += contribution
        rows.append(PairPayment(w, R, p_R, contribution))
    return PaymentProfile(tuple(payments), tuple(rows))


def utilities(pay: PaymentProfile, inst: Instance) -> UtilityProfile:
    """Per winning pair, contribution minus true cost; losers get zero."""
    u = [0.0] * inst.m
    for row in pay.breakdown:
        u[row.winner.worker] += row.contribution - inst.workers[row.winner.worker].cost
    return UtilityProfile(tuple(u))
