"""Winner selection over matching pairs with a fixed selection threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Uncoverable
from .instance import Instance
from .matching import MatchingPair, MatchingSet
from .oracle import EXACT, ArrivalModel, expected_opt_cost

THRESHOLD_FACTOR = 64.0
TYPE_I = "I"
TYPE_II = "II"


@dataclass(frozen=True)
class WinningPair:
    pair: MatchingPair
    incremental: frozenset[int]
    selection_type: str
    round: int

    @property
    def subset(self) -> int:
        return self.pair.subset

    @property
    def worker(self) -> int:
        return self.pair.worker

    @property
    def bid(self) -> float:
        return self.pair.bid


@dataclass(frozen=True)
class WinningSet:
    pairs: tuple[WinningPair, ...]
    threshold: float | None

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def subsets(self) -> frozenset[int]:
        return frozenset(w.subset for w in self.pairs)

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(w.subset for w in self.pairs)

    def wins(self, subset: int) -> bool:
        return subset in self.subsets


def selection_threshold(P: MatchingSet, arrivals: ArrivalModel | int, mode: str = EXACT,
                        samples: int = 10_000, seed: int = 0) -> float:
    return THRESHOLD_FACTOR * expected_opt_cost(P, arrivals, mode, samples, seed).value


def cost_effectiveness(pair: MatchingPair, uncovered: frozenset[int] | set[int] | int) -> float:
    """Bid per newly covered task; infinite when the pair covers nothing new."""
    if isinstance(uncovered, int):
        fresh = (pair.mask & uncovered).bit_count()
    else:
        fresh = len(pair.tasks & uncovered)
    return pair.bid / fresh if fresh else math.inf


def _bits(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def greedy_cover(n: int, P: MatchingSet, rule) -> tuple[WinningPair, ...]:
    """Repeatedly pick ``rule(candidates, uncovered_mask)`` until every task is covered.

    ``rule`` returns ``(pair, selection_type)``; candidates are the
    remaining pairs that still cover at least one uncovered task.
    """
    uncovered = (1 << n) - 1
    remaining = list(P.pairs)
    chosen: list[WinningPair] = []
    while uncovered:
        live = [p for p in remaining if p.mask & uncovered]
        if not live:
            raise Uncoverable(f"tasks {sorted(_bits(uncovered))} cannot be covered")
        pick, kind = rule(live, uncovered)
        chosen.append(WinningPair(pick, _bits(pick.mask & uncovered), kind, len(chosen)))
        remaining.remove(pick)
        uncovered &= ~pick.mask
    return tuple(chosen)


def select_winners(inst: Instance, P: MatchingSet, T: float) -> WinningSet:
    """Threshold-gated greedy selection.

    Each round: if the smallest cost-effectiveness is at most
    ``T / |uncovered|`` take that pair (Type I); otherwise take the
    lowest-bid pair that still covers an uncovered task (Type II).
    Ties go to the lower worker id, then the lower subset index.
    """

    def rule(live, uncovered):
        per_task = T / uncovered.bit_count()
        best = min(live, key=lambda p: (cost_effectiveness(p, uncovered), p.key))
        if cost_effectiveness(best, uncovered) <= per_task:
            return best, TYPE_I
        return min(live, key=lambda p: (p.bid, p.key)), TYPE_II

    return WinningSet(greedy_cover(inst.n, P, rule), T)
