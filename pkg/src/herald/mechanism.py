"""One auction end to end: matching, threshold, selection, payment."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

from .baselines import cone_select, cosy_select
from .errors import DomainError
from .instance import BidProfile, Instance
from .matching import CONSTRAINED, MatchingSet, fixed_matching, match
from .oracle import AUTO
from .payment import PaymentProfile, UtilityProfile, determine_payments, utilities
from .scorefn import ScoreKind, matching_probabilities
from .selection import WinningSet, select_winners, selection_threshold

MECHANISMS = ("herald", "cone", "cosy")


@dataclass(frozen=True)
class AuctionResult:
    matching: MatchingSet
    threshold: float | None
    winners: WinningSet
    payments: PaymentProfile
    utilities: UtilityProfile
    social_cost: float
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def total_payment(self) -> float:
        return self.payments.total

    @property
    def winning_bid_total(self) -> float:
        return math.fsum(w.bid for w in self.winners)


def hit_probability(size: int, n: int, k: int) -> float:
    """Chance that ``k`` uniform i.i.d. arrivals hit a fixed set of ``size`` tasks."""
    return 1.0 - (1.0 - size / n) ** k


def expected_social_cost(S: WinningSet, costs: Sequence[float], n: int, k: int) -> float:
    """Expected cost of winners whose newly covered tasks receive an arrival.

    A winner's cost counts for arrival set ``A`` iff ``A`` meets the tasks
    that winner covered first; with ``k`` uniform i.i.d. arrivals that
    happens with probability ``1 - (1 - |cover|/n)^k``.
    """
    return math.fsum(costs[w.worker] * hit_probability(len(w.incremental), n, k) for w in S)


def select(inst: Instance, P: MatchingSet, mechanism: str, T: float | None = None) -> WinningSet:
    if mechanism == "herald":
        if T is None:
            raise DomainError("herald selection needs a threshold")
        return select_winners(inst, P, T)
    if mechanism == "cone":
        return cone_select(inst, P)
    if mechanism == "cosy":
        return cosy_select(inst, P)
    raise DomainError(f"unknown mechanism {mechanism!r}")


def replay(inst: Instance, P: MatchingSet, bids: BidProfile | Sequence[float], mechanism: str = "herald",
           k: int = 1, oracle_mode: str = AUTO, samples: int = 10_000, seed: int = 0,
           T: float | None = None) -> tuple[WinningSet, PaymentProfile, float | None]:
    """Selection and payment on a fixed matching with (possibly misreported) bids.

    The matching keeps its assignment; bid snapshots are refreshed. For
    ``herald`` the threshold is recomputed from the refreshed bids unless
    ``T`` is pinned.
    """
    P = P.with_bids(bids)
    if mechanism == "herald" and T is None:
        T = selection_threshold(P, k, oracle_mode, samples, seed)
    S = select(inst, P, mechanism, T)
    return S, determine_payments(P, S, bids), T


def run_auction(inst: Instance, mechanism: str = "herald", score: ScoreKind | str = ScoreKind.LINEAR,
                epsilon: float = 0.1, k: int = 1, seed: int = 0, matching_mode: str = CONSTRAINED,
                oracle_mode: str = AUTO, samples: int = 10_000, bids: BidProfile | None = None,
                matching: MatchingSet | None = None) -> AuctionResult:
    """Run every phase once; a fixed matching on the instance is honoured."""
    bids = inst.truthful_bids() if bids is None else bids
    bids.check(inst.b_max)

    t0 = time.perf_counter()
    if matching is not None:
        P = matching.with_bids(bids)
    elif inst.fixed_matching is not None:
        P = fixed_matching(inst, bids)
    else:
        dist = matching_probabilities(bids, score, epsilon, inst.b_max)
        P = match(inst, dist, seed, matching_mode, bids)
    t1 = time.perf_counter()
    T = selection_threshold(P, k, oracle_mode, samples, seed) if mechanism == "herald" else None
    S = select(inst, P, mechanism, T)
    t2 = time.perf_counter()
    pay = determine_payments(P, S, bids)
    t3 = time.perf_counter()

    return AuctionResult(
        matching=P,
        threshold=T,
        winners=S,
        payments=pay,
        utilities=utilities(pay, inst),
        social_cost=expected_social_cost(S, inst.costs, inst.n, k),
        timings={"match_ms": 1e3 * (t1 - t0), "select_ms": 1e3 * (t2 - t1), "pay_ms": 1e3 * (t3 - t2)},
    )
