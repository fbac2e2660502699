"""Problem instances: tasks, task subsets, workers and their costs.

Tasks are dense integers ``0..n-1`` and workers are dense integers
``0..m-1``; the i-th entry of ``Instance.workers`` must carry id ``i``.
The lowest admissible bid is fixed at 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, GenerationExhausted
from .scorefn import ScoreKind

B_MIN = 1.0
REPAIR_ATTEMPTS = 1000


@dataclass(frozen=True)
class Worker:
    id: int
    cost: float


@dataclass(frozen=True)
class Instance:
    n: int
    subsets: tuple[frozenset[int], ...]
    workers: tuple[Worker, ...]
    b_max: float
    # (subset index, worker id) per subset; pins the matching phase
    fixed_matching: tuple[tuple[int, int], ...] | None = None

    @property
    def m(self) -> int:
        return len(self.workers)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.subsets)

    @property
    def costs(self) -> tuple[float, ...]:
        return tuple(w.cost for w in self.workers)

    def truthful_bids(self) -> "BidProfile":
        return BidProfile(self.costs)

    def to_dict(self) -> dict:
        out: dict = {
            "n": self.n,
            "b_max": self.b_max,
            "subsets": [sorted(s) for s in self.subsets],
            "workers": [{"id": w.id, "cost": w.cost} for w in self.workers],
        }
        if self.fixed_matching is not None:
            out["fixed_matching"] = [{"subset": j, "worker": i} for j, i in self.fixed_matching]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        fixed = data.get("fixed_matching")
        return cls(
            n=int(data["n"]),
            subsets=tuple(frozenset(int(t) for t in s) for s in data["subsets"]),
            workers=tuple(Worker(int(w["id"]), float(w["cost"])) for w in data["workers"]),
            b_max=float(data["b_max"]),
            fixed_matching=None if fixed is None else tuple((int(p["subset"]), int(p["worker"])) for p in fixed),
        )

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))


def load_instance(path: str | Path) -> Instance:
    return Instance.from_json(Path(path).read_text())


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(inst.to_json() + "\n")


@dataclass(frozen=True)
class BidProfile:
    """One bid per worker, aligned with worker ids."""

    bids: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "bids", tuple(float(b) for b in self.bids))

    def __len__(self) -> int:
        return len(self.bids)

    def __getitem__(self, i: int) -> float:
        return self.bids[i]

    def with_bid(self, worker: int, bid: float) -> "BidProfile":
        bids = list(self.bids)
        bids[worker] = float(bid)
        return BidProfile(tuple(bids))

    def check(self, b_max: float) -> None:
        for i, b in enumerate(self.bids):
            if not (B_MIN <= b <= b_max):
                raise DomainError(f"bid of worker {i} is {b}, outside [1, {b_max}]")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))


def validate_instance(inst: Instance) -> ValidationReport:
    """Check every structural constraint and report all violations found."""
    report = ValidationReport()
    n, m, l = inst.n, inst.m, inst.l
    if n < 1:
        report.add("n<1", f"task count must be positive, got {n}")
    if not inst.b_max > B_MIN:
        report.add("b_max<=1", f"b_max must exceed 1, got {inst.b_max}")
    for i, w in enumerate(inst.workers):
        if w.id != i:
            report.add("worker-id", f"worker at position {i} has id {w.id}")
        if not (B_MIN <= w.cost <= inst.b_max):
            report.add("cost-range", f"worker {w.id} cost {w.cost} outside [1, {inst.b_max}]")
    counts = [0] * max(n, 0)
    for j, s in enumerate(inst.subsets):
        if not s:
            report.add("subset-empty", f"subset {j} is empty")
        bad = [t for t in s if not 0 <= t < n]
        if bad:
            report.add("task-range", f"subset {j} has out-of-range tasks {sorted(bad)}")
        for t in s:
            if 0 <= t < n:
                counts[t] += 1
    missing = [t for t, c in enumerate(counts) if c == 0]
    if missing:
        report.add("union", f"tasks {missing} are in no subset")
    thin = [t for t, c in enumerate(counts) if c < 2]
    if thin:
        report.add("coverage<2", f"tasks {thin} are in fewer than two subsets")
    if not l < m * n:
        report.add("l<mn fails", f"l={l} is not below m*n={m * n}")
    if inst.fixed_matching is not None:
        seen = sorted(j for j, _ in inst.fixed_matching)
        if seen != list(range(l)):
            report.add("fixed-matching", "fixed matching must assign exactly one worker per subset")
        if any(not 0 <= i < m for _, i in inst.fixed_matching):
            report.add("fixed-matching", "fixed matching names an unknown worker")
    return report


@dataclass(frozen=True)
class ScenarioConfig:
    """A simulation scenario: distributions plus the sweep of (m, n) points."""

    setting: str
    cost_interval: tuple[float, float]
    size_interval: tuple[int, int]
    m_values: tuple[int, ...]
    n_values: tuple[int, ...]
    b_max: float = 5.0
    epsilon: float = 0.1
    score: ScoreKind = ScoreKind.LINEAR
    k: int = 1
    runs: int = 100
    seed: int = 0
    l_per_worker: int = 1

    def __post_init__(self):
        lo, hi = self.cost_interval
        if not (B_MIN <= lo <= hi <= self.b_max):
            raise DomainError(f"cost interval {self.cost_interval} not within [1, {self.b_max}]")
        slo, shi = self.size_interval
        if not 1 <= slo <= shi:
            raise DomainError(f"bad subset-size interval {self.size_interval}")
        if self.runs < 1:
            raise DomainError("runs must be at least 1")
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        if not self.m_values or not self.n_values:
            raise DomainError("sweep must contain at least one point")

    def points(self) -> list[tuple[int, int]]:
        return [(m, n) for n in self.n_values for m in self.m_values]

    def at(self, m: int, n: int) -> "ScenarioConfig":
        return replace(self, m_values=(m,), n_values=(n,))

    def l_for(self, m: int) -> int:
        return self.l_per_worker * m


def generate_instance(cfg: ScenarioConfig, seed: int) -> Instance:
    """Draw a random instance for a single-point scenario.

    Costs are uniform on the cost interval, subset sizes uniform on the
    integer size interval, and membership uniform without replacement.
    Tasks left in fewer than two subsets are repaired by swapping them
    into a random subset in place of a task that is covered three or more
    times, which keeps every size and always terminates once the sizes
    add up to at least ``2n``.
    """
    if len(cfg.m_values) != 1 or len(cfg.n_values) != 1:
        raise DomainError("generate_instance needs a single-point config; use cfg.at(m, n)")
    m, n = cfg.m_values[0], cfg.n_values[0]
    l = cfg.l_for(m)
    if not l < m * n:
        raise DomainError(f"l={l} violates l < m*n={m * n}")
    rng = np.random.default_rng(seed)
    costs = rng.uniform(cfg.cost_interval[0], cfg.cost_interval[1], size=m)
    slo, shi = cfg.size_interval
    sizes = np.minimum(rng.integers(slo, shi + 1, size=l), n)
    if int(sizes.sum()) < 2 * n:
        raise GenerationExhausted(f"{l} subsets with {int(sizes.sum())} slots cannot cover {n} tasks twice")
    subsets = [set(rng.choice(n, size=int(s), replace=False).tolist()) for s in sizes]

    counts = np.zeros(n, dtype=int)
    for s in subsets:
        counts[list(s)] += 1
    for _ in range(REPAIR_ATTEMPTS):
        thin = np.flatnonzero(counts < 2)
        if thin.size == 0:
            break
        task = int(thin[0])
        # move one slot from a task covered 3+ times; sizes are kept, deficit drops by one
        donors = [(j, u) for j, s in enumerate(subsets) if task not in s for u in sorted(s) if counts[u] > 2]
        if not donors:
            raise GenerationExhausted(f"task {task} cannot reach two subsets")
        j, u = donors[int(rng.integers(len(donors)))]
        subsets[j].remove(u)
        subsets[j].add(task)
        counts[u] -= 1
        counts[task] += 1
    else:
        raise GenerationExhausted(f"coverage repair did not converge in {REPAIR_ATTEMPTS} attempts")

    return Instance(
        n=n,
        subsets=tuple(frozenset(s) for s in subsets),
        workers=tuple(Worker(i, float(c)) for i, c in enumerate(costs)),
        b_max=float(cfg.b_max),
    )


def make_instance(n: int, subsets: Sequence[Iterable[int]], costs: Sequence[float], b_max: float,
                  fixed_matching: Sequence[tuple[int, int]] | None = None) -> Instance:
    """Convenience constructor from plain lists."""
    return Instance(
        n=n,
        subsets=tuple(frozenset(s) for s in subsets),
        workers=tuple(Worker(i, float(c)) for i, c in enumerate(costs)),
        b_max=float(b_max),
        fixed_matching=None if fixed_matching is None else tuple(tuple(p) for p in fixed_matching),
    )
