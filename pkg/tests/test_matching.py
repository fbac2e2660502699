import itertools
import math

import numpy as np
import pytest

from herald import fixed_matching, make_instance, match, matching_probabilities, outcome_probability
from herald.errors import ConstraintExhausted, DomainError
from herald.matching import CONSTRAINED, DP_PURE, distinct_workers_per_task
from herald.scorefn import MatchingDistribution, ScoreKind

from conftest import small_instances


def test_single_worker_takes_everything():
    inst = make_instance(3, [{0, 1}, {1, 2}, {0, 2}], [2.0], 5)
    d = matching_probabilities(inst.costs, "lin", 0.1, 5)
    assert match(inst, d, 0).workers == (0, 0, 0)


def test_constrained_needs_two_workers():
    inst = make_instance(3, [{0, 1}, {1, 2}, {0, 2}], [2.0], 5)
    d = matching_probabilities(inst.costs, "lin", 0.1, 5)
    with pytest.raises(ConstraintExhausted):
        match(inst, d, 0, CONSTRAINED)


def test_example2_fixed_matching(ex2):
    P = fixed_matching(ex2)
    assert [(p.subset, p.worker, p.bid) for p in P] == [(j, j, c) for j, c in enumerate(ex2.costs)]


def test_outcome_probability_examples():
    uniform = MatchingDistribution((0.25,) * 4, 0.1, ScoreKind.LINEAR)
    assert outcome_probability([2], uniform) == pytest.approx(0.25)
    two = MatchingDistribution((0.6, 0.4), 0.1, ScoreKind.LINEAR)
    assert outcome_probability([0, 1], two) == pytest.approx(0.24)


@pytest.mark.parametrize("kind", ["lin", "log"])
@pytest.mark.parametrize("m,l", [(2, 3), (3, 3), (4, 2), (4, 4)])
def test_outcome_probabilities_sum_to_one(kind, m, l):
    d = matching_probabilities(np.linspace(1, 5, m), kind, 0.7, 5)
    total = math.fsum(outcome_probability(o, d) for o in itertools.product(range(m), repeat=l))
    assert total == pytest.approx(1.0, abs=1e-12)
    assert all(outcome_probability(o, d) > 0 for o in itertools.product(range(m), repeat=l))


def test_sampling_frequencies_match_distribution():
    inst = make_instance(30, [set(range(30))] * 50, [1.0, 2.0, 3.5, 5.0], 5)
    d = matching_probabilities(inst.costs, "lin", 2.0, 5)
    counts = np.zeros(4)
    for seed in range(2000):
        for w in match(inst, d, seed).workers:
            counts[w] += 1
    draws = counts.sum()
    assert draws == 100_000
    p = np.asarray(d.probs)
    se = np.sqrt(p * (1 - p) / draws)
    assert np.all(np.abs(counts / draws - p) <= 3 * se)


def test_deterministic_for_equal_inputs():
    for inst in small_instances(5, seed=3):
        d = matching_probabilities(inst.costs, "log", 0.1, inst.b_max)
        for mode in (DP_PURE, CONSTRAINED):
            assert match(inst, d, 9, mode) == match(inst, d, 9, mode)


def test_constrained_mode_covers_each_task_twice():
    for inst in small_instances(20, seed=4):
        d = matching_probabilities(inst.costs, "lin", 0.1, inst.b_max)
        P = match(inst, d, 1, CONSTRAINED)
        assert min(distinct_workers_per_task(inst, P.workers)) >= 2


def test_bad_mode_and_length(ex2):
    d = matching_probabilities(ex2.costs, "lin", 0.1, 5)
    with pytest.raises(DomainError):
        match(ex2, d, 0, "greedy")
    with pytest.raises(DomainError):
        match(ex2, matching_probabilities([1, 2], "lin", 0.1, 5), 0)
