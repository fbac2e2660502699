"""Mechanised checks of privacy, incentive and cost guarantees.

Each audit returns a report dataclass with a ``passed`` flag; the CLI turns
a failed gate into a nonzero exit status.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, EnumTooLarge
from .instance import B_MIN, BidProfile, Instance, ScenarioConfig, generate_instance
from .matching import CONSTRAINED, MatchingPair, MatchingSet, fixed_matching, match, outcome_probability
from .mechanism import AuctionResult, expected_social_cost, replay, run_auction
from .oracle import AUTO, EXACT, expected_opt_cost
from .scorefn import ScoreKind, matching_probabilities
from .seeding import derive_seed
from .payment import replaced_set
from .selection import select_winners

DP_MAX_M = 4
DP_MAX_L = 4
RATIO_SLACK = 1e-9
GAIN_TOL = 1e-9


# -- differential privacy ------------------------------------------------------

def dp_bound(epsilon: float, l: int) -> float:
    """The bound the privacy proofs establish: exp(eps*(e-1)*l/2)."""
    return math.exp(epsilon * (math.e - 1.0) * l / 2.0)


def dp_headline_bound(epsilon: float, l: int) -> float:
    """The advertised guarantee exp(eps*l/2); reported, not gated."""
    return math.exp(epsilon * l / 2.0)


@dataclass
class DpAuditReport:
    epsilon: float
    kind: str
    l: int
    m: int
    worst_ratio: float
    bound: float
    headline_bound: float
    profiles: int
    neighbours: int
    outcomes: int
    worst_case: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= self.bound * (1.0 + RATIO_SLACK)

    @property
    def within_headline(self) -> bool:
        return self.worst_ratio <= self.headline_bound * (1.0 + RATIO_SLACK)

    def to_dict(self) -> dict:
        return asdict(self) | {"passed": self.passed, "within_headline": self.within_headline}


def neighbour_values(b: float, b_max: float) -> list[float]:
    """Single-coordinate replacements: extremes, midpoint and +/-10%."""
    vals = {B_MIN, (B_MIN + b_max) / 2.0, b_max, min(b_max, b * 1.1), max(B_MIN, b * 0.9)}
    return sorted(v for v in vals if v != b)


def max_outcome_ratio(m: int, l: int, kind: ScoreKind, epsilon: float, b_max: float,
                      b: Sequence[float], b2: Sequence[float]) -> tuple[float, tuple[int, ...]]:
    """Largest Pr[M(b)=I] / Pr[M(b2)=I] over all ``m**l`` matching outcomes."""
    d1 = matching_probabilities(b, kind, epsilon, b_max)
    d2 = matching_probabilities(b2, kind, epsilon, b_max)
    worst, arg = 0.0, ()
    for outcome in itertools.product(range(m), repeat=l):
        r = outcome_probability(outcome, d1) / outcome_probability(outcome, d2)
        if r > worst:
            worst, arg = r, outcome
    return worst, arg


def dp_exact_audit(inst: Instance, kind: ScoreKind | str, epsilon: float,
                   bid_grid: Iterable[float] | None = None) -> DpAuditReport:
    """Exact worst-case probability ratio over neighbouring bid profiles.

    Every profile on ``bid_grid``^m is paired with each single-coordinate
    neighbour (both orders), and every outcome is enumerated.
    """
    kind = ScoreKind.parse(kind)
    m, l, b_max = inst.m, inst.l, inst.b_max
    if m > DP_MAX_M or l > DP_MAX_L:
        raise EnumTooLarge(f"exact audit needs m <= {DP_MAX_M} and l <= {DP_MAX_L}, got m={m}, l={l}")
    grid = sorted(set(bid_grid)) if bid_grid is not None else [B_MIN, (B_MIN + b_max) / 2.0, b_max]
    if any(not B_MIN <= g <= b_max for g in grid):
        raise DomainError("bid grid must lie in [1, b_max]")

    report = DpAuditReport(float(epsilon), kind.value, l, m, 1.0, dp_bound(epsilon, l),
                           dp_headline_bound(epsilon, l), 0, 0, m ** l)
    for profile in itertools.product(grid, repeat=m):
        report.profiles += 1
        for i in range(m):
            for v in neighbour_values(profile[i], b_max):
                other = list(profile)
                other[i] = v
                report.neighbours += 1
                for a, b in ((profile, other), (other, profile)):
                    r, outcome = max_outcome_ratio(m, l, kind, epsilon, b_max, a, b)
                    if r > report.worst_ratio:
                        report.worst_ratio = r
                        report.worst_case = {"b": list(a), "b_prime": list(b), "outcome": list(outcome)}
    return report


# -- incentives ----------------------------------------------------------------

def worker_utility(inst: Instance, pay, worker: int) -> float:
    cost = inst.workers[worker].cost
    return math.fsum(r.contribution - cost for r in pay.breakdown if r.winner.worker == worker)


@dataclass
class TruthReport:
    worker: int
    true_cost: float
    truthful_utility: float
    max_gain: float
    best_deviation: float | None
    grid_size: int

    @property
    def passed(self) -> bool:
        return self.max_gain <= GAIN_TOL

    def to_dict(self) -> dict:
        return asdict(self) | {"passed": self.passed}


def truthfulness_audit(inst: Instance, P: MatchingSet, worker_id: int, grid_size: int = 50, k: int = 1,
                       mechanism: str = "herald", oracle_mode: str = AUTO) -> TruthReport:
    """Best utility gain from any grid misreport, with the matching held fixed.

    Only ``worker_id``'s bid changes; selection (threshold included) and
    payment are replayed for every grid point on ``[1, b_max]``.
    """
    truthful = inst.truthful_bids()
    _, pay, _ = replay(inst, P, truthful, mechanism, k, oracle_mode)
    base = worker_utility(inst, pay, worker_id)
    best_gain, best_bid = 0.0, None
    for b in np.linspace(B_MIN, inst.b_max, grid_size):
        _, pay_b, _ = replay(inst, P, truthful.with_bid(worker_id, float(b)), mechanism, k, oracle_mode)
        gain = worker_utility(inst, pay_b, worker_id) - base
        if gain > best_gain:
            best_gain, best_bid = gain, float(b)
    return TruthReport(worker_id, inst.workers[worker_id].cost, base, best_gain, best_bid, grid_size)


@dataclass
class CriticalValueReport:
    checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _with_pair_bid(P: MatchingSet, subset: int, bid: float) -> MatchingSet:
    pairs = tuple(MatchingPair(p.subset, p.worker, bid, p.tasks) if p.subset == subset else p for p in P.pairs)
    return MatchingSet(pairs, P.n)


def critical_value_audit(inst: Instance, P: MatchingSet, T: float, grid_size: int = 20) -> CriticalValueReport:
    """Pair-level re-bids with everything else (threshold included) fixed.

    A winning pair that re-bids above its replaced-set total must lose;
    one that re-bids at or below it and still wins keeps its payment.
    """
    report = CriticalValueReport()
    for w in select_winners(inst, P, T):
        _, p_R = replaced_set(P, w)
        for b in np.linspace(B_MIN, inst.b_max, grid_size):
            b = float(b)
            if b == p_R:
                continue
            Q = _with_pair_bid(P, w.subset, b)
            wins = select_winners(inst, Q, T).wins(w.subset)
            report.checked += 1
            if b > p_R and wins:
                report.violations.append({"subset": w.subset, "bid": b, "p_R": p_R, "issue": "wins above p_R"})
            elif b < p_R and wins:
                _, p_R2 = replaced_set(Q, Q[w.subset])
                if max(b, p_R2) != p_R:
                    report.violations.append({"subset": w.subset, "bid": b, "p_R": p_R, "issue": "payment moved"})
    return report


def monotonicity_audit(inst: Instance, P: MatchingSet, T: float, grid_size: int = 20) -> list[dict]:
    """Winning pairs that stop winning after lowering their own bid (should be none)."""
    failures = []
    for w in select_winners(inst, P, T):
        for b in np.linspace(B_MIN, w.bid, grid_size):
            if not select_winners(inst, _with_pair_bid(P, w.subset, float(b)), T).wins(w.subset):
                failures.append({"subset": w.subset, "bid": w.bid, "lowered_to": float(b)})
    return failures


def ir_violations(inst: Instance, result: AuctionResult, bids: BidProfile | None = None) -> list[str]:
    """Individual-rationality breaches of one truthful run (empty when IR holds)."""
    out = []
    bids = inst.truthful_bids() if bids is None else bids
    if bids.bids != inst.costs:
        raise DomainError("individual rationality is defined for truthful bids")
    winners = {w.worker for w in result.winners}
    for row in result.payments.breakdown:
        c = inst.workers[row.winner.worker].cost
        if row.contribution < c:
            out.append(f"worker {row.winner.worker} paid {row.contribution} < cost {c} on subset {row.winner.subset}")
    for i in range(inst.m):
        if i not in winners and (result.utilities[i] != 0.0 or result.payments.payments[i] != 0.0):
            out.append(f"loser {i} has utility {result.utilities[i]}")
        if i in winners and result.utilities[i] < 0.0:
            out.append(f"winner {i} has negative utility {result.utilities[i]}")
    return out


@dataclass
class IRReport:
    runs: int = 0
    winning_pairs: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, inst: Instance, result: AuctionResult) -> None:
        self.runs += 1
        self.winning_pairs += len(result.winners)
        self.violations.extend(ir_violations(inst, result))

    def to_dict(self) -> dict:
        return asdict(self) | {"passed": self.passed}


def ir_audit(inst: Instance, seeds: Iterable[int], mechanism: str = "herald", score: str = "lin",
             epsilon: float = 0.1, k: int = 1) -> IRReport:
    report = IRReport()
    for s in seeds:
        report.record(inst, run_auction(inst, mechanism, score, epsilon, k, seed=s, matching_mode=CONSTRAINED))
    return report


# -- competitive ratio -----------------------------------------------------------

def ratio_ceiling(n: int, l: int) -> float:
    """Explicit-constant ceiling 64 ln n + 8 ln 2n + 16 ln l."""
    return 64.0 * math.log(n) + 8.0 * math.log(2 * n) + 16.0 * math.log(l)


@dataclass
class RatioReport:
    n: int
    l: int
    k: int
    expected_cost: float
    expected_opt: float
    ratio: float
    ceiling: float
    seeds: int
    max_seed_ratio: float

    @property
    def passed(self) -> bool:
        return self.ratio <= self.ceiling

    def to_dict(self) -> dict:
        return asdict(self) | {"passed": self.passed}


def matching_ratio(inst: Instance, P: MatchingSet, k: int, oracle_mode: str = EXACT) -> tuple[float, float]:
    """(E_A[attributed winner cost], E_A[C_OPT]) for one matching."""
    opt = expected_opt_cost(P, k, oracle_mode).value
    S = select_winners(inst, P, 64.0 * opt)
    return expected_social_cost(S, inst.costs, inst.n, k), opt


def _summarise(pairs: list[tuple[float, float]], n: int, l: int, k: int) -> RatioReport:
    cost = math.fsum(c for c, _ in pairs) / len(pairs)
    opt = math.fsum(o for _, o in pairs) / len(pairs)
    return RatioReport(n, l, k, cost, opt, cost / opt, ratio_ceiling(n, l), len(pairs),
                       max(c / o for c, o in pairs))


def instance_ratio(inst: Instance, seeds: Iterable[int], k: int = 1, score: str = "lin",
                   epsilon: float = 0.1) -> RatioReport:
    """Ratio for one instance over random matchings (or its fixed matching)."""
    if inst.fixed_matching is not None:
        pairs = [matching_ratio(inst, fixed_matching(inst), k)]
    else:
        dist = matching_probabilities(inst.costs, score, epsilon, inst.b_max)
        pairs = [matching_ratio(inst, match(inst, dist, s, CONSTRAINED), k) for s in seeds]
    return _summarise(pairs, inst.n, inst.l, k)


def ratio_audit(cfg: ScenarioConfig, seeds: Iterable[int]) -> RatioReport:
    """Average attributed cost over average optimum on fresh instances, one per seed."""
    if len(cfg.points()) != 1:
        raise DomainError("ratio_audit needs a single-point config")
    (m, n), = cfg.points()
    pairs = []
    for s in seeds:
        inst = generate_instance(cfg, derive_seed(cfg.seed, "ratio", m, n, s))
        dist = matching_probabilities(inst.costs, cfg.score, cfg.epsilon, inst.b_max)
        P = match(inst, dist, derive_seed(cfg.seed, "ratio-match", m, n, s), CONSTRAINED)
        pairs.append(matching_ratio(inst, P, cfg.k))
    return _summarise(pairs, n, cfg.l_for(m), cfg.k)
