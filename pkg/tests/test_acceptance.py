"""Acceptance criteria 1-9, one test each, at the stated tolerances."""

import itertools
import json
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from herald import (brute_force_min_cover, fixed_matching, load_golden, make_instance, match,
                    matching_probabilities, min_cover_cost, run_auction, validate_instance)
from herald.audit import dp_exact_audit, ir_violations, ratio_audit, truthfulness_audit
from herald.cli import main
from herald.errors import ConstraintExhausted
from herald.experiment import epsilon_sweep, run_setting, runtime_trend, setting_configs, spearman
from herald.matching import CONSTRAINED, matching_from_workers
from herald.oracle import EXACT

from conftest import small_instances

pytestmark = pytest.mark.slow
HERALD_ONLY = (("herald", "lin"), ("herald", "log"))


def mean(records, metric="social_cost", **match_):
    vals = [getattr(r, metric) for r in records if all(getattr(r, k) == v for k, v in match_.items())]
    return math.fsum(vals) / len(vals)


def golden_run():
    return run_auction(load_golden("example2-k1").instance, k=1, oracle_mode=EXACT)


def dp_instances():
    for m, l in itertools.product(range(2, 5), range(1, 4)):
        yield make_instance(m, [set(range(m))] * l, [1.0 + 4.0 * i / (m - 1) for i in range(m)], 5)


def truth_cases():
    """100 random instances (n <= 10, m <= 8) with one constrained matching each."""
    for idx, inst in enumerate(small_instances(100, seed=4, n_range=(5, 10), m_range=(3, 8))):
        d = matching_probabilities(inst.costs, "lin", 0.1, inst.b_max)
        yield inst, match(inst, d, idx, CONSTRAINED)


def test_c1_golden_example(criterion):
    t0 = time.perf_counter()
    res = golden_run()
    elapsed = time.perf_counter() - t0
    expected = (4.6, 4.2, 0.0, 3.6, 0.0, 0.0, 0.0)
    ok = (abs(res.threshold - 125.44) <= 1e-9 and res.winners.subsets == frozenset({0, 1, 3})
          and all(abs(a - b) <= 1e-9 for a, b in zip(res.payments.payments, expected)) and elapsed < 1.0)
    assert criterion(1, ok, f"T={res.threshold:.12g} winners={sorted(res.winners.subsets)} "
                            f"payments={[round(p, 12) for p in res.payments.payments]} in {elapsed:.3f}s")


def test_c2_oracle_matches_brute_force(criterion):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        n, l = int(rng.integers(1, 9)), int(rng.integers(1, 13))
        subsets = [set(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist()) for _ in range(l)]
        inst = make_instance(n, subsets, np.round(rng.uniform(1, 5, size=l), 3), 5)
        P = matching_from_workers(inst, [int(w) for w in rng.integers(0, l, size=l)])
        covered = sorted(set().union(*subsets))
        A = [t for t in covered if rng.random() < 0.75] or covered
        mismatches += min_cover_cost(P, A).cost != brute_force_min_cover(P, A)
    elapsed = time.perf_counter() - t0
    assert criterion(2, mismatches == 0 and elapsed < 30, f"{mismatches} mismatches over 200 instances in {elapsed:.2f}s")


def test_c3_dp_exact_ratio(criterion):
    t0 = time.perf_counter()
    worst_slack, failures, cases = 0.0, [], 0
    for inst in dp_instances():
        for kind in ("lin", "log"):
            for eps in (0.1, 0.3, 1.0):
                rep = dp_exact_audit(inst, kind, eps)
                cases += 1
                worst_slack = max(worst_slack, rep.worst_ratio / rep.bound)
                if not rep.passed:
                    failures.append((inst.m, inst.l, kind, eps, rep.worst_ratio, rep.bound))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300
    assert criterion(3, ok, f"{cases} audits, worst ratio/bound {worst_slack:.6f}, {len(failures)} failures, "
                            f"{elapsed:.1f}s")


def test_c4_conditional_truthfulness(criterion):
    t0 = time.perf_counter()
    worst, violations, audited = 0.0, 0, 0
    for inst, P in truth_cases():
        for i in range(inst.m):
            rep = truthfulness_audit(inst, P, i, grid_size=50, k=1, oracle_mode=EXACT)
            audited += 1
            violations += not rep.passed
            worst = max(worst, rep.max_gain)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 600
    assert criterion(4, ok, f"max gain {worst:.6g} over {audited} worker audits "
                            f"({violations} with a profitable deviation), {elapsed:.1f}s")


def test_c5_individual_rationality(criterion):
    runs, violations = 0, []

    def check(inst, res):
        nonlocal runs
        runs += 1
        violations.extend(ir_violations(inst, res))

    check(load_golden("example2-k1").instance, golden_run())
    for inst in dp_instances():
        if validate_instance(inst).ok:
            check(inst, run_auction(inst, seed=1))
    for inst, P in truth_cases():
        check(inst, run_auction(inst, matching=P, oracle_mode=EXACT))
    rng = np.random.default_rng(5)
    fuzz = skipped = 0
    for idx, inst in enumerate(small_instances(1200, seed=5, n_range=(4, 12), m_range=(3, 10))):
        if fuzz == 1000:
            break
        mech = ("herald", "cone", "cosy")[idx % 3]
        try:
            res = run_auction(inst, mech, ("lin", "log")[idx % 2], float(rng.choice([0.1, 0.3, 1.0])),
                              k=int(rng.integers(1, 3)), seed=idx)
        except ConstraintExhausted:
            skipped += 1  # no matching gives every task two distinct workers
            continue
        check(inst, res)
        fuzz += 1
    assert fuzz == 1000
    assert criterion(5, not violations, f"{len(violations)} violations over {runs} truthful runs "
                                        f"(1000 fuzz, {skipped} infeasible fuzz draws skipped)")


def test_c6_competitive_ratio_ceiling(criterion):
    t0 = time.perf_counter()
    (base,) = setting_configs("I", "desk")
    worst, failures, points = 0.0, [], 0
    for n in (12, 14, 16):
        for m in range(6, 16):
            for k in (1, 2):
                rep = ratio_audit(replace(base.at(m, n), k=k), range(100))
                points += 1
                worst = max(worst, rep.ratio / rep.ceiling)
                if not rep.passed:
                    failures.append((n, m, k, rep.ratio, rep.ceiling))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 1200
    assert criterion(6, ok, f"{points} points x 100 seeds, worst ratio/ceiling {worst:.4f}, "
                            f"{len(failures)} failures, {elapsed:.1f}s")


def test_c7_trends(criterion):
    parts = {}
    rec = run_setting("I", runs=100, seed=0, combos=HERALD_ONLY).records
    lin, log = mean(rec, score="lin"), mean(rec, score="log")
    parts["a"] = (log <= lin, f"log {log:.6f} <= lin {lin:.6f}")

    for tag, setting, sign in (("b", "III", 1), ("c", "IV", -1)):
        rec = run_setting(setting, runs=100, seed=0, combos=HERALD_ONLY).records
        labels = [c.setting for c in setting_configs(setting)]
        rhos = []
        for score in ("lin", "log"):
            for metric in ("social_cost", "total_payment"):
                ys = [mean(rec, metric, setting=lab, score=score) for lab in labels]
                rhos.append(sign * spearman(range(len(labels)), ys))
        parts[tag] = (min(rhos) > 0.9, f"min signed Spearman {min(rhos):.3f}")

    rec = epsilon_sweep("I", [0.1, 0.3], runs=100, seed=0, combos=HERALD_ONLY).records
    gaps = {s: (mean(rec, epsilon=0.3, score=s), mean(rec, epsilon=0.1, score=s)) for s in ("lin", "log")}
    parts["d"] = (all(a <= b for a, b in gaps.values()),
                  "; ".join(f"{s}: {a:.6f} <= {b:.6f}" for s, (a, b) in gaps.items()))

    ok = all(p for p, _ in parts.values())
    assert criterion(7, ok, " | ".join(f"({k}) {'ok' if p else 'FAIL'} {d}" for k, (p, d) in parts.items()))


def test_c8_cli_determinism(criterion, tmp_path, capsys):
    def run(tag, *args):
        out = tmp_path / tag
        assert main([*args, "--out", str(out)]) == 0
        return out

    a = run("a", "experiment", "--setting", "III", "--runs", "2", "--seed", "11")
    b = run("b", "experiment", "--manifest", str(a / "settingIII_manifest.json"))
    c = run("c", "experiment", "eps-sweep", "--setting", "II", "--epsilons", "0.1,0.3", "--runs", "1", "--seed", "4")
    d = run("d", "experiment", "--manifest", str(c / "eps_settingII_manifest.json"))
    golden = tmp_path / "ex2.json"
    main(["golden", "--export", str(golden)])
    sims = []
    for tag in ("s1", "s2"):
        path = tmp_path / f"{tag}.csv"
        main(["simulate", "--instance", str(golden), "--seed", "3", "--out", str(path)])
        sims.append(path.read_bytes())
    capsys.readouterr()
    same = [
        (a / "settingIII_runs.csv").read_bytes() == (b / "settingIII_runs.csv").read_bytes(),
        (a / "settingIII_aggregate.csv").read_bytes() == (b / "settingIII_aggregate.csv").read_bytes(),
        (c / "eps_settingII_runs.csv").read_bytes() == (d / "eps_settingII_runs.csv").read_bytes(),
        sims[0] == sims[1],
    ]
    manifest = json.loads((a / "settingIII_manifest.json").read_text())
    assert criterion(8, all(same), f"{sum(same)}/{len(same)} CSV pairs byte-identical "
                                   f"(config hash {manifest['config_hash'][:12]})")


def test_c9_runtime_scaling(criterion):
    rho = {}
    for setting, x in (("I", "m"), ("II", "n")):
        rec = run_setting(setting, runs=20, seed=0, scale="paper", timing=True, combos=HERALD_ONLY).records
        rho[setting] = runtime_trend(rec, x)
    ok = all(r > 0.9 for r in rho.values())
    assert criterion(9, ok, f"Spearman runtime vs m (Setting I) {rho['I']:.3f}, vs n (Setting II) {rho['II']:.3f}")
