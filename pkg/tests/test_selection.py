import math

import pytest

from herald import (cost_effectiveness, fixed_matching, make_instance, match, matching_probabilities, select_winners,
                    selection_threshold)
from herald.audit import monotonicity_audit, ratio_ceiling
from herald.errors import Uncoverable
from herald.matching import CONSTRAINED
from herald.oracle import MONTE_CARLO
from herald.selection import TYPE_I, TYPE_II

from conftest import small_instances


def constrained(inst, seed=0, score="lin"):
    return match(inst, matching_probabilities(inst.costs, score, 0.1, inst.b_max), seed, CONSTRAINED)


def test_example2_threshold(ex2_matching):
    assert selection_threshold(ex2_matching, 1) == pytest.approx(125.44, abs=1e-9)
    mc = selection_threshold(ex2_matching, 1, MONTE_CARLO, samples=100_000, seed=1)
    assert mc == pytest.approx(125.44, abs=1.3)


def test_threshold_for_single_pair():
    P = fixed_matching(make_instance(3, [{0, 1, 2}], [2.0], 5, [(0, 0)]))
    assert selection_threshold(P, 1) == pytest.approx(128.0)
    assert selection_threshold(P, 3) == pytest.approx(128.0)


def test_cost_effectiveness(ex2_matching):
    assert cost_effectiveness(ex2_matching[0], set(range(5))) == pytest.approx(0.7)
    assert cost_effectiveness(ex2_matching[3], {2, 3, 4}) == pytest.approx(1.3)
    assert cost_effectiveness(ex2_matching[4], {0, 1}) == math.inf
    # bitmask form agrees with the set form
    assert cost_effectiveness(ex2_matching[3], 0b11100) == pytest.approx(1.3)


def test_example2_winners(ex2, ex2_matching):
    S = select_winners(ex2, ex2_matching, 125.44)
    assert S.order == (0, 3, 1)
    assert S.subsets == frozenset({0, 1, 3})
    assert all(w.selection_type == TYPE_I for w in S)


def test_zero_threshold_is_all_type_two(ex2, ex2_matching):
    S = select_winners(ex2, ex2_matching, 0.0)
    assert all(w.selection_type == TYPE_II for w in S)
    assert S.order[0] == 0


def test_single_pair_wins_alone():
    inst = make_instance(3, [{0, 1, 2}], [2.0], 5, [(0, 0)])
    assert select_winners(inst, fixed_matching(inst), 10.0).order == (0,)


def test_uncoverable():
    inst = make_instance(3, [{0, 1}, {0}], [2.0, 1.0], 5, [(0, 0), (1, 1)])
    with pytest.raises(Uncoverable):
        select_winners(inst, fixed_matching(inst), 10.0)


def test_rounds_shrink_and_cover():
    for inst in small_instances(40, seed=11):
        P = constrained(inst)
        for T in (0.0, selection_threshold(P, 1), math.inf):
            S = select_winners(inst, P, T)
            assert len(S) <= inst.n
            seen = set()
            for w in S:
                assert w.incremental and not (w.incremental & seen)
                seen |= w.incremental
            assert seen == set(range(inst.n))


def test_lowering_a_winning_bid_keeps_it_winning():
    for inst in small_instances(40, seed=12):
        P = constrained(inst, 2)
        assert monotonicity_audit(inst, P, selection_threshold(P, 1), grid_size=10) == []


@pytest.mark.slow
def test_bid_sum_within_ceiling_in_nearly_all_runs():
    ok = total = 0
    for inst in small_instances(1000, seed=13, n_range=(8, 12), m_range=(4, 10)):
        P = constrained(inst, total)
        opt = selection_threshold(P, 1) / 64
        S = select_winners(inst, P, 64 * opt)
        total += 1
        ok += math.fsum(w.bid for w in S) <= ratio_ceiling(inst.n, inst.l) * opt
    assert ok / total >= 0.99
