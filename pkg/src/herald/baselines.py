"""Comparison mechanisms: cost-effectiveness greedy (CONE) and bid greedy (COSY).

Both reuse the replaced-set payment rule unchanged.
"""

from __future__ import annotations

from .instance import Instance
from .matching import MatchingSet
from .selection import TYPE_I, TYPE_II, WinningSet, cost_effectiveness, greedy_cover


def cone_select(inst: Instance, P: MatchingSet) -> WinningSet:
    """Always take the pair with the lowest cost-effectiveness."""

    def rule(live, uncovered):
        return min(live, key=lambda p: (cost_effectiveness(p, uncovered), p.key)), TYPE_I

    return WinningSet(greedy_cover(inst.n, P, rule), None)


def cosy_select(inst: Instance, P: MatchingSet) -> WinningSet:
    """Always take the lowest bid among pairs that still cover something new."""

    def rule(live, uncovered):
        return min(live, key=lambda p: (p.bid, p.key)), TYPE_II

    return WinningSet(greedy_cover(inst.n, P, rule), None)
