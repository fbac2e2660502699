"""Command-line entry point: ``herald <command> ...``.

Exit status is 0 on success, 1 when an audit gate fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .audit import (dp_exact_audit, instance_ratio, ir_audit, truthfulness_audit)
from .errors import HeraldError
from .experiment import (CSV_HEADER, INDEPENDENT, SHARED, RunRecord, epsilon_sweep, execute, run_setting,
                         write_runs_csv)
from .fixtures import GOLDEN_NAMES, load_golden
from .instance import Instance, load_instance, save_instance
from .matching import CONSTRAINED, MatchingSet, fixed_matching, match
from .mechanism import MECHANISMS, replay, run_auction
from .oracle import AUTO, EXACT, MONTE_CARLO, expected_opt_cost, min_cover_cost
from .scorefn import ScoreKind, matching_probabilities

log = logging.getLogger("herald")


def _epsilons(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}") from exc


def _emit(report: dict, summary: str, passed: bool) -> int:
    print(json.dumps(report, indent=2, sort_keys=True))
    print(("PASS " if passed else "FAIL ") + summary, file=sys.stderr)
    return 0 if passed else 1


def _matching_for(inst: Instance, score: str, epsilon: float, seed: int) -> MatchingSet:
    if inst.fixed_matching is not None:
        return fixed_matching(inst)
    dist = matching_probabilities(inst.costs, score, epsilon, inst.b_max)
    return match(inst, dist, seed, CONSTRAINED)


# -- commands --------------------------------------------------------------------

def cmd_simulate(args) -> int:
    inst = load_instance(args.instance)
    res = run_auction(inst, args.mechanism, args.score, args.epsilon, args.k, seed=args.seed,
                      oracle_mode=args.oracle_mode)
    t = res.timings if args.timing else {}
    rec = RunRecord(Path(args.instance).stem, args.mechanism, ScoreKind.parse(args.score).value, args.epsilon,
                    inst.m, inst.n, inst.l, args.k, 0, args.seed, res.social_cost, res.total_payment,
                    len(res.winners), t.get("match_ms"), t.get("select_ms"), t.get("pay_ms"))
    if args.out:
        write_runs_csv([rec], Path(args.out))
    else:
        print(",".join(CSV_HEADER))
        print(",".join(str(x) for x in rec.row()))
    T = "-" if res.threshold is None else f"{res.threshold:g}"
    winners = ", ".join(f"subset {w.subset} (worker {w.worker}, type {w.selection_type})" for w in res.winners)
    print(f"T={T}; winners: {winners}; total payment {res.total_payment:g}", file=sys.stderr)
    return 0


def cmd_experiment(args) -> int:
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text())
        out = execute(manifest, args.out, plot_script=not args.no_plot_script, plot=args.plot)
    elif args.sweep == "eps-sweep":
        out = epsilon_sweep(args.setting, args.epsilons, args.runs, args.seed, args.scale, args.k, args.out,
                            args.protocol, args.timing, plot_script=not args.no_plot_script, plot=args.plot)
    else:
        out = run_setting(args.setting, args.runs, args.seed, args.scale, args.k, args.epsilon, args.out,
                          args.protocol, args.timing, plot_script=not args.no_plot_script, plot=args.plot)
    for p in [out.csv_path, out.aggregate_path, out.manifest_path, out.plot_script_path, *out.figure_paths]:
        if p is not None:
            print(p)
    return 0


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    P = _matching_for(inst, args.score, args.epsilon, args.seed)
    exp = expected_opt_cost(P, args.k, args.mode, args.samples, args.seed)
    tasks = range(inst.n) if args.tasks is None else [int(t) for t in args.tasks.split(",")]
    full = min_cover_cost(P, tasks)
    report = {
        "expected_opt": exp.value,
        "mode": exp.mode,
        "samples": exp.samples,
        "stderr": exp.stderr,
        "threshold": 64.0 * exp.value,
        "tasks": sorted(set(tasks)),
        "cover_cost": full.cost,
        "cover": [{"subset": j, "worker": P[j].worker, "bid": P[j].bid} for j in full.cover],
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_audit(args) -> int:
    inst = load_instance(args.instance)
    if args.kind == "dp":
        kinds = [ScoreKind.LINEAR, ScoreKind.LOGARITHMIC] if args.score is None else [ScoreKind.parse(args.score)]
        reports = [dp_exact_audit(inst, kind, args.epsilon) for kind in kinds]
        worst = max(r.worst_ratio for r in reports)
        ok = all(r.passed for r in reports)
        return _emit({"dp": [r.to_dict() for r in reports]},
                     f"dp worst ratio {worst:.6g} vs bound {reports[0].bound:.6g} "
                     f"(headline {reports[0].headline_bound:.6g})", ok)

    score = args.score or "lin"
    if args.kind == "truth":
        P = _matching_for(inst, score, args.epsilon, 0)
        reports = [truthfulness_audit(inst, P, i, args.grid, args.k) for i in range(inst.m)]
        worst = max(reports, key=lambda r: r.max_gain)
        return _emit({"truth": [r.to_dict() for r in reports]},
                     f"max deviation gain {worst.max_gain:.6g} (worker {worst.worker}, bid {worst.best_deviation})",
                     all(r.passed for r in reports))
    if args.kind == "ir":
        rep = ir_audit(inst, range(args.seeds), "herald", score, args.epsilon, args.k)
        return _emit({"ir": rep.to_dict()}, f"{rep.runs} runs, {len(rep.violations)} IR violations", rep.passed)
    rep = instance_ratio(inst, range(args.seeds), args.k, score, args.epsilon)
    return _emit({"ratio": rep.to_dict()}, f"ratio {rep.ratio:.6g} vs ceiling {rep.ceiling:.6g}", rep.passed)


def cmd_golden(args) -> int:
    case = load_golden(args.name)
    if args.export:
        save_instance(case.instance, args.export)
        print(args.export, file=sys.stderr)
    P = fixed_matching(case.instance)
    S, pay, T = replay(case.instance, P, case.instance.truthful_bids(), "herald", case.k, EXACT)
    ok = (math.isclose(T, case.threshold, abs_tol=1e-9) and S.order == case.winners
          and all(math.isclose(a, b, abs_tol=1e-9) for a, b in zip(pay.payments, case.payments)))
    report = {"name": case.name, "k": case.k, "threshold": T, "expected_threshold": case.threshold,
              "winners": list(S.order), "payments": list(pay.payments), "note": case.note, "passed": ok}
    return _emit(report, f"{case.name}: T={T:g}, winners {list(S.order)}", ok)


# -- parser ----------------------------------------------------------------------

def _experiment_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--setting", choices=["I", "II", "III", "IV"], default="I")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", choices=["paper", "desk"], default="desk")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out", help="output directory")
    p.add_argument("--protocol", choices=[SHARED, INDEPENDENT], default=SHARED,
                   help="whether baselines reuse the linear-score matching")
    p.add_argument("--timing", action="store_true", help="fill the *_ms columns (output no longer reproducible)")
    p.add_argument("--plot", action="store_true", help="render PNG figures (needs matplotlib)")
    p.add_argument("--no-plot-script", action="store_true")
    p.add_argument("--manifest", help="rerun the experiment recorded in a manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="herald", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one auction on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--mechanism", choices=MECHANISMS, default="herald")
    p.add_argument("--score", choices=["lin", "log"], default="lin")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-mode", choices=[EXACT, MONTE_CARLO, AUTO], default=AUTO)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="sweep a simulation setting")
    _experiment_options(p)
    p.add_argument("--epsilon", type=float, default=0.1)
    sweep = p.add_subparsers(dest="sweep")
    q = sweep.add_parser("eps-sweep", help="repeat the sweep for several epsilons")
    _experiment_options(q)
    q.add_argument("--epsilons", type=_epsilons, default=[0.1, 0.3])
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("oracle", help="expected optimal cover cost")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--mode", choices=[EXACT, MONTE_CARLO, AUTO], default=EXACT)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--score", choices=["lin", "log"], default="lin")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--tasks", help="comma-separated arrival set for the printed cover (default: all tasks)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("audit", help="check a guarantee; nonzero exit on failure")
    p.add_argument("kind", choices=["dp", "truth", "ir", "ratio"])
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--score", choices=["lin", "log"])
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("golden", help="replay a built-in worked example")
    p.add_argument("--name", choices=GOLDEN_NAMES, default="example2-k1")
    p.add_argument("--export", help="write the case's instance JSON here")
    p.set_defaults(func=cmd_golden)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (HeraldError, ValueError, OSError) as exc:
        print(f"herald: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
