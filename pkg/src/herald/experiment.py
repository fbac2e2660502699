"""Simulation sweeps over the four evaluation settings.

Every run draws its instance and matching from seeds derived from
``(master seed, setting, sweep point, run_id)``. Mechanisms, score kinds,
epsilons and setting variants share those seeds, so their comparisons use
common random numbers.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DomainError
from .instance import ScenarioConfig, generate_instance
from .matching import CONSTRAINED
from .mechanism import run_auction
from .oracle import EXACT, MONTE_CARLO
from .scorefn import ScoreKind
from .seeding import derive_seed

CSV_HEADER = ["setting", "mechanism", "score", "epsilon", "m", "n", "l", "k", "run_id", "seed",
              "social_cost", "total_payment", "winners", "match_ms", "select_ms", "pay_ms"]
AGGREGATE_HEADER = ["setting", "mechanism", "score", "epsilon", "m", "n", "l", "k", "runs",
                    "social_cost", "social_cost_se", "total_payment", "total_payment_se", "winners",
                    "match_ms", "select_ms", "pay_ms"]
DEFAULT_COMBOS = (("herald", "lin"), ("herald", "log"), ("cone", "lin"), ("cosy", "lin"))
SHARED = "shared"
INDEPENDENT = "independent"
MC_SAMPLES = 10_000

_M_SWEEP = tuple(range(60, 151, 5))
_N_SWEEP = tuple(range(80, 161, 5))
_DESK_M = tuple(range(6, 16))
_DESK_N = tuple(range(8, 17))


def _full(setting: str) -> list[ScenarioConfig]:
    base = dict(cost_interval=(1.0, 5.0), size_interval=(15, 20), m_values=_M_SWEEP, n_values=(120,))
    if setting == "I":
        return [ScenarioConfig("I", **base)]
    if setting == "II":
        return [ScenarioConfig("II", **(base | dict(m_values=(80,), n_values=_N_SWEEP)))]
    if setting == "III":
        return [ScenarioConfig(f"III:cost={lo:g}-{hi:g}", **(base | dict(cost_interval=(lo, hi))), b_max=15.0)
                for lo, hi in ((1.0, 5.0), (5.0, 10.0), (10.0, 15.0))]
    if setting == "IV":
        return [ScenarioConfig(f"IV:size={lo}-{hi}", **(base | dict(size_interval=(lo, hi))))
                for lo, hi in ((10, 15), (15, 20), (20, 25))]
    raise DomainError(f"unknown setting {setting!r}")


def _desk(setting: str) -> list[ScenarioConfig]:
    # three candidate subsets per worker keep >=2-coverage feasible at small m
    base = dict(cost_interval=(1.0, 5.0), size_interval=(3, 4), m_values=_DESK_M, n_values=(12,),
                l_per_worker=3)
    if setting == "I":
        return [ScenarioConfig("I", **base)]
    if setting == "II":
        return [ScenarioConfig("II", **(base | dict(m_values=(8,), n_values=_DESK_N)))]
    if setting == "III":
        return [ScenarioConfig(f"III:cost={lo:g}-{hi:g}", **(base | dict(cost_interval=(lo, hi))), b_max=15.0)
                for lo, hi in ((1.0, 5.0), (5.0, 10.0), (10.0, 15.0))]
    if setting == "IV":
        return [ScenarioConfig(f"IV:size={lo}-{hi}", **(base | dict(size_interval=(lo, hi))))
                for lo, hi in ((2, 3), (3, 4), (4, 5))]
    raise DomainError(f"unknown setting {setting!r}")


def setting_configs(setting: str, scale: str = "desk", epsilon: float = 0.1, k: int = 1,
                    runs: int = 100, seed: int = 0) -> list[ScenarioConfig]:
    """Scenario configs (one per variant) for a setting at full ("paper") or desk scale."""
    if scale == "paper":
        cfgs = _full(setting)
    elif scale == "desk":
        cfgs = _desk(setting)
    else:
        raise DomainError(f"unknown scale {scale!r}")
    return [replace(c, epsilon=epsilon, k=k, runs=runs, seed=seed) for c in cfgs]


@dataclass
class RunRecord:
    setting: str
    mechanism: str
    score: str
    epsilon: float
    m: int
    n: int
    l: int
    k: int
    run_id: int
    seed: int
    social_cost: float
    total_payment: float
    winners: int
    match_ms: float | None = None
    select_ms: float | None = None
    pay_ms: float | None = None
    winning_bid_total: float = field(default=0.0, repr=False)

    def row(self) -> list:
        def ms(x):
            return "" if x is None else repr(x)

        return [self.setting, self.mechanism, self.score, repr(self.epsilon), self.m, self.n, self.l, self.k,
                self.run_id, self.seed, repr(self.social_cost), repr(self.total_payment), self.winners,
                ms(self.match_ms), ms(self.select_ms), ms(self.pay_ms)]

    @property
    def runtime_ms(self) -> float:
        return (self.match_ms or 0.0) + (self.select_ms or 0.0) + (self.pay_ms or 0.0)


@dataclass
class ExperimentOutput:
    records: list[RunRecord]
    manifest: dict
    csv_path: Path | None = None
    aggregate_path: Path | None = None
    manifest_path: Path | None = None
    plot_script_path: Path | None = None
    figure_paths: list[Path] = field(default_factory=list)

    def aggregate(self) -> list[dict]:
        return aggregate(self.records)


def oracle_mode_for(scale: str) -> str:
    return MONTE_CARLO if scale == "paper" else EXACT


def simulate_run(cfg: ScenarioConfig, m: int, n: int, run_id: int, combos: Sequence[tuple[str, str]],
                 epsilons: Sequence[float], oracle_mode: str = EXACT, protocol: str = SHARED,
                 timing: bool = False) -> list[RunRecord]:
    """All mechanism/score/epsilon combinations on one seeded instance."""
    point = cfg.at(m, n)
    run_seed = derive_seed(cfg.seed, cfg.setting.split(":")[0], m, n, run_id)
    inst = generate_instance(point, run_seed)
    match_seed = derive_seed(run_seed, "match")
    out = []
    for eps in epsilons:
        for mechanism, score in combos:
            seed = match_seed
            if protocol == INDEPENDENT and mechanism != "herald":
                seed = derive_seed(run_seed, "match", mechanism)
            res = run_auction(inst, mechanism, ScoreKind.parse(score), eps, cfg.k, seed=seed,
                              matching_mode=CONSTRAINED, oracle_mode=oracle_mode,
                              samples=MC_SAMPLES)
            t = res.timings if timing else {}
            out.append(RunRecord(cfg.setting, mechanism, ScoreKind.parse(score).value, float(eps), m, n, inst.l,
                                 cfg.k, run_id, run_seed, res.social_cost, res.total_payment, len(res.winners),
                                 t.get("match_ms"), t.get("select_ms"), t.get("pay_ms"),
                                 res.winning_bid_total))
    return out


def _job(args) -> list[RunRecord]:
    return simulate_run(*args)


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("HERALD_THREADS", "1")))
    except ValueError:
        return 1


def run_configs(cfgs: Iterable[ScenarioConfig], combos: Sequence[tuple[str, str]], epsilons: Sequence[float],
                oracle_mode: str, protocol: str = SHARED, timing: bool = False) -> list[RunRecord]:
    cfgs = list(cfgs)
    # run-major order spreads machine drift evenly over sweep points
    jobs = [(cfg, m, n, r, tuple(combos), tuple(epsilons), oracle_mode, protocol, timing)
            for r in range(max(c.runs for c in cfgs)) for cfg in cfgs for (m, n) in cfg.points() if r < cfg.runs]
    workers = thread_cap()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        chunks = [_job(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    # stable order: config, epsilon, mechanism combo, point, run
    eps_rank = {float(e): i for i, e in enumerate(epsilons)}
    combo_rank = {(mech, ScoreKind.parse(s).value): i for i, (mech, s) in enumerate(combos)}
    cfg_rank = {c.setting: i for i, c in enumerate(cfgs)}
    records.sort(key=lambda r: (cfg_rank.get(r.setting, 0), eps_rank[r.epsilon],
                                combo_rank[(r.mechanism, r.score)], r.n, r.m, r.run_id))
    return records


def aggregate(records: Iterable[RunRecord]) -> list[dict]:
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.setting, r.mechanism, r.score, r.epsilon, r.m, r.n, r.l, r.k), []).append(r)

    def mean(xs):
        return math.fsum(xs) / len(xs)

    def se(xs):
        if len(xs) < 2:
            return 0.0
        mu = mean(xs)
        return math.sqrt(math.fsum((x - mu) ** 2 for x in xs) / (len(xs) - 1) / len(xs))

    rows = []
    for key, rs in groups.items():
        row = dict(zip(AGGREGATE_HEADER[:8], key))
        cost = [r.social_cost for r in rs]
        pay = [r.total_payment for r in rs]
        row.update(runs=len(rs), social_cost=mean(cost), social_cost_se=se(cost), total_payment=mean(pay),
                   total_payment_se=se(pay), winners=mean([r.winners for r in rs]))
        for col in ("match_ms", "select_ms", "pay_ms"):
            vals = [getattr(r, col) for r in rs]
            row[col] = None if any(v is None for v in vals) else mean(vals)
        rows.append(row)
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_runs_csv(records: Iterable[RunRecord], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.row())


def write_aggregate_csv(rows: Iterable[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in AGGREGATE_HEADER])


def config_hash(manifest: dict) -> str:
    body = {k: v for k, v in manifest.items() if k != "config_hash"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def make_manifest(command: str, setting: str, scale: str, runs: int, seed: int, k: int,
                  epsilons: Sequence[float], protocol: str, timing: bool,
                  combos: Sequence[tuple[str, str]]) -> dict:
    from . import __version__

    manifest = {
        "command": command,
        "setting": setting,
        "scale": scale,
        "runs": runs,
        "seed": seed,
        "k": k,
        "epsilons": [float(e) for e in epsilons],
        "protocol": protocol,
        "timing": timing,
        "combos": [list(c) for c in combos],
        "oracle_mode": oracle_mode_for(scale),
        "version": __version__,
    }
    manifest["config_hash"] = config_hash(manifest)
    return manifest


def execute(manifest: dict, out_dir: str | Path | None = None, plot_script: bool = True,
            plot: bool = False) -> ExperimentOutput:
    """Run the experiment a manifest describes and write its outputs to ``out_dir``."""
    cfgs = setting_configs(manifest["setting"], manifest["scale"], k=manifest["k"], runs=manifest["runs"],
                           seed=manifest["seed"])
    combos = [tuple(c) for c in manifest["combos"]]
    records = run_configs(cfgs, combos, manifest["epsilons"], manifest["oracle_mode"],
                          manifest["protocol"], manifest["timing"])
    out = ExperimentOutput(records, manifest)
    if out_dir is None:
        return out

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = f"setting{manifest['setting']}" if manifest["command"] == "setting" else f"eps_setting{manifest['setting']}"
    out.csv_path = out_dir / f"{tag}_runs.csv"
    out.aggregate_path = out_dir / f"{tag}_aggregate.csv"
    out.manifest_path = out_dir / f"{tag}_manifest.json"
    write_runs_csv(records, out.csv_path)
    rows = aggregate(records)
    write_aggregate_csv(rows, out.aggregate_path)
    out.manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    x = "n" if manifest["setting"] == "II" else "m"
    if plot_script:
        from .plotting import write_plot_script

        out.plot_script_path = write_plot_script(out.aggregate_path, out_dir / f"plot_{tag}.py", x)
    if plot:
        from .plotting import render_aggregate

        out.figure_paths = render_aggregate(rows, out_dir, tag, x)
    return out


def run_setting(setting: str, runs: int = 100, seed: int = 0, scale: str = "desk", k: int = 1,
                epsilon: float = 0.1, out_dir: str | Path | None = None, protocol: str = SHARED,
                timing: bool = False, combos: Sequence[tuple[str, str]] = DEFAULT_COMBOS,
                plot_script: bool = True, plot: bool = False) -> ExperimentOutput:
    """Every sweep point of ``setting`` x every combo, ``runs`` seeded runs each."""
    if runs < 1:
        raise DomainError("runs must be at least 1")
    manifest = make_manifest("setting", setting, scale, runs, seed, k, [epsilon], protocol, timing, combos)
    return execute(manifest, out_dir, plot_script, plot)


def epsilon_sweep(setting_base: str, epsilons: Sequence[float], runs: int = 100, seed: int = 0,
                  scale: str = "desk", k: int = 1, out_dir: str | Path | None = None, protocol: str = SHARED,
                  timing: bool = False, combos: Sequence[tuple[str, str]] = DEFAULT_COMBOS,
                  plot_script: bool = True, plot: bool = False) -> ExperimentOutput:
    """The same sweep repeated per epsilon, on shared instances and matching seeds."""
    if not epsilons or any(e <= 0 for e in epsilons):
        raise DomainError("epsilons must be a non-empty list of positive values")
    if runs < 1:
        raise DomainError("runs must be at least 1")
    manifest = make_manifest("eps-sweep", setting_base, scale, runs, seed, k, epsilons, protocol, timing, combos)
    return execute(manifest, out_dir, plot_script, plot)


def point_means(records: Iterable[RunRecord], x: str, metric: str, reduce=None,
                **match) -> tuple[list[float], list[float]]:
    """Mean (or ``reduce``) of ``metric`` per value of sweep variable ``x`` over records matching ``match``."""
    groups: dict[float, list[float]] = {}
    for r in records:
        if all(getattr(r, k) == v for k, v in match.items()):
            groups.setdefault(getattr(r, x), []).append(getattr(r, metric))
    xs = sorted(groups)
    reduce = reduce or (lambda v: math.fsum(v) / len(v))
    return xs, [reduce(groups[v]) for v in xs]


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    from scipy.stats import spearmanr

    return float(spearmanr(x, y).statistic)


def runtime_trend(records: Iterable[RunRecord], x: str, **match) -> float:
    """Rank correlation between the sweep variable and median total runtime per point."""
    records = list(records)
    if any(r.match_ms is None for r in records):
        raise DomainError("runtime trend needs records produced with timing enabled")
    xs, ys = point_means(records, x, "runtime_ms", statistics.median, **match)
    return spearman(xs, ys)
