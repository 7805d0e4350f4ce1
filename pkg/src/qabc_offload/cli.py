"""Command-line entry point: ``qabc-offload {generate,optimize,verify,taguchi}``.

Exit status is 0 on success, 1 on a runtime failure and 2 on a usage error.
Every output is a deterministic function of the flags (including ``--seed``);
``--jobs`` only changes scheduling.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .estimators import BaselineOffloader, ExhaustiveOffloader, QABCOffloader, check_scenario
from .objective import TIER_NAMES, is_feasible
from .optimizer import BASELINES, BEST_LEVELS, MAX_ORACLE_TASKS, OracleSizeError
from .quantum import DEFAULT_PHI
from .scenario import (
    GenerationParams,
    ScenarioError,
    generate_scenario,
    save_scenario,
)
from .taguchi import main_effects, run_taguchi, write_effects_csv, write_rows_csv

PRESETS = {"paper-best": BEST_LEVELS}


def _common(parser: argparse.ArgumentParser, scenario: bool = True) -> None:
    g = parser.add_argument_group("common")
    if scenario:
        g.add_argument("--scenario", default="reference",
                       help="scenario JSON file, or 'reference' for the bundled 8-task scenario")
    g.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    g.add_argument("--out", type=Path, default=None,
                   help="output directory (default: $QABC_OUT_DIR or the current directory)")
    g.add_argument("--queue-mode", choices=("load_aware", "constant"), default="load_aware",
                   help="server waiting time: booked load or a fixed constant")
    g.add_argument("--q-edge-s", type=float, default=0.0, help="edge queue time in constant mode")
    g.add_argument("--q-cloud-s", type=float, default=0.0, help="cloud queue time in constant mode")
    g.add_argument("--lambda-cap", type=float, default=1e3,
                   help="penalty per unit of relative capacity excess (default: 1000)")
    g.add_argument("--lambda-deadline", type=float, default=0.0,
                   help="penalty per missed deadline (default: 0, report only)")
    g.add_argument("--np", dest="n_pop", type=int, default=None, help="population size")
    g.add_argument("--iters", dest="n_iter", type=int, default=None, help="iterations")
    g.add_argument("--limit", dest="scout_limit", type=int, default=None, help="scout limit")
    g.add_argument("--phi", type=float, default=DEFAULT_PHI, help="rotation magnitude (rad)")
    g.add_argument("--eta0", type=float, default=0.5, help="local observation weight")
    g.add_argument("--eta1", type=float, default=0.2, help="edge observation weight")
    g.add_argument("--eta2", type=float, default=0.3, help="cloud observation weight")
    g.add_argument("--preset", choices=sorted(PRESETS), default=None,
                   help="named (np, iters, limit) levels; explicit flags win")
    g.add_argument("--jobs", type=int, default=1, help="worker threads (-1: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qabc-offload",
        description="Quantum-inspired bee colony task offloading for vehicular edge computing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random scenario file")
    gen.add_argument("--vehicles", type=int, required=True)
    gen.add_argument("--rsus", type=int, required=True)
    gen.add_argument("--tasks-per-vehicle", type=int, required=True)
    gen.add_argument("--highway-m", type=float, default=GenerationParams.highway_m)
    gen.add_argument("--rsu-range-m", type=float, default=None,
                     help="coverage radius (default: 250 m, widened to cover the highway)")
    gen.add_argument("--name", default="scenario.json", help="output file name")
    _common(gen, scenario=False)

    opt = sub.add_parser("optimize", help="run QABC on a scenario")
    _common(opt)

    ver = sub.add_parser("verify", help="compare QABC runs against the exhaustive optimum")
    ver.add_argument("--runs", type=int, default=50, help="number of seeded QABC runs")
    _common(ver)

    tag = sub.add_parser("taguchi", help="run the L9 tuning experiment")
    tag.add_argument("--replicates", type=int, default=5)
    _common(tag)
    return parser


def _out_dir(args) -> Path:
    out = args.out or Path(os.environ.get("QABC_OUT_DIR", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _scenario(args):
    return check_scenario(args.scenario if args.scenario == "reference" else Path(args.scenario))


def _objective_kw(args) -> dict:
    return dict(lambda_cap=args.lambda_cap, lambda_deadline=args.lambda_deadline,
                queue_mode=args.queue_mode, q_edge_s=args.q_edge_s, q_cloud_s=args.q_cloud_s)


def _qabc(args, seed=None) -> QABCOffloader:
    levels = dict(BEST_LEVELS)
    if args.preset:
        levels.update(PRESETS[args.preset])
    for key in ("n_pop", "n_iter", "scout_limit"):
        if getattr(args, key) is not None:
            levels[key] = getattr(args, key)
    return QABCOffloader(**levels, phi=args.phi, eta0=args.eta0, eta1=args.eta1, eta2=args.eta2,
                         random_state=args.seed if seed is None else seed,
                         n_jobs=args.jobs, **_objective_kw(args))


def _dump(obj, path: Path) -> Path:
    path.write_text(json.dumps(obj, indent=2) + "\n")
    return path


def _default_range(highway_m: float, n_rsus: int) -> float:
    # smallest radius that still covers the highway, but no less than the library default
    return max(GenerationParams.rsu_range_m, highway_m / (2 * max(n_rsus, 1)))


def cmd_generate(args) -> int:
    params = GenerationParams(
        n_vehicles=args.vehicles,
        n_rsus=args.rsus,
        tasks_per_vehicle=args.tasks_per_vehicle,
        highway_m=args.highway_m,
        rsu_range_m=args.rsu_range_m or _default_range(args.highway_m, args.rsus),
    )
    scenario = generate_scenario(params, args.seed)
    path = save_scenario(scenario, _out_dir(args) / args.name)
    print(f"{path}: {len(scenario.vehicles)} vehicles, {len(scenario.rsus)} RSUs, "
          f"{scenario.n_tasks} tasks")
    return 0


def cmd_optimize(args) -> int:
    scenario = _scenario(args)
    est = _qabc(args).fit(scenario)
    report = est.report(scenario)
    out = _out_dir(args)
    params = {k: v for k, v in est.get_params().items() if k != "n_jobs"}
    record = {
        "command": "optimize",
        "scenario": str(args.scenario),
        "n_tasks": scenario.n_tasks,
        "seed": args.seed,
        "params": params,
        "best_decision": est.best_decision_.tolist(),
        "best_tiers": [TIER_NAMES[t] for t in est.best_decision_],
        "best_fitness_s": est.best_fitness_,
        "total_latency_s": report.total_latency_s,
        "feasible": is_feasible(report),
        "capacity_excess_cycles": report.capacity_excess_cycles,
        "deadline_misses": report.deadline_misses,
        "evaluations": est.n_evaluations_,
        "convergence": est.convergence_.tolist(),
    }
    _dump(record, out / "run.json")
    with (out / "convergence.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "best_fitness_s"])
        for k, f in enumerate(est.convergence_.tolist(), start=1):
            w.writerow([k, repr(f)])
    status = "feasible" if record["feasible"] else "INFEASIBLE"
    print(f"best fitness {est.best_fitness_:.6g} s ({status}); wrote {out / 'run.json'}")
    return 0


def cmd_verify(args) -> int:
    scenario = _scenario(args)
    if scenario.n_tasks > MAX_ORACLE_TASKS:
        raise OracleSizeError(f"scenario has {scenario.n_tasks} tasks; verify supports at most "
                              f"{MAX_ORACLE_TASKS}")
    if args.runs < 1:
        raise ValueError("--runs must be >= 1")
    obj = _objective_kw(args)
    oracle = ExhaustiveOffloader(**obj).fit(scenario)
    optimum = oracle.best_fitness_
    fits = np.array([_qabc(args, seed=args.seed + k).fit(scenario).best_fitness_
                     for k in range(args.runs)])
    hits = int(np.sum(fits == optimum))
    gaps = fits - optimum
    baselines = {kind: BaselineOffloader(kind, random_state=args.seed, **obj).fit(scenario).best_fitness_
                 for kind in BASELINES}
    record = {
        "command": "verify",
        "scenario": str(args.scenario),
        "n_tasks": scenario.n_tasks,
        "seeds": [args.seed, args.seed + args.runs - 1],
        "oracle_decision": oracle.best_decision_.tolist(),
        "oracle_fitness_s": optimum,
        "runs": args.runs,
        "hits": hits,
        "hit_rate": hits / args.runs,
        "never_below_oracle": bool(np.all(fits >= optimum)),
        "gap_mean_s": float(gaps.mean()),
        "gap_max_s": float(gaps.max()),
        "run_fitness_s": fits.tolist(),
        "baselines": baselines,
        "best_baseline": min(baselines, key=baselines.get),
    }
    path = _dump(record, _out_dir(args) / "verify.json")
    print(f"oracle {optimum:.6g} s; hit rate {hits}/{args.runs}; "
          f"max gap {record['gap_max_s']:.3g} s; wrote {path}")
    return 0


def cmd_taguchi(args) -> int:
    scenario = _scenario(args)
    report = run_taguchi(scenario, args.replicates, args.seed, estimator=_qabc(args),
                         n_jobs=args.jobs if args.jobs != 1 else None)
    out = _out_dir(args)
    write_rows_csv(report, out / "rows.csv")
    write_effects_csv(report, out / "effects.csv")
    for factor, level in report.best_levels.items():
        print(f"best {factor} = {level}")
    for entry in main_effects(report):
        print(f"rank {entry['rank']}: {entry['factor']} (delta {entry['delta_db']:.4f} dB)")
    if report.infeasible_rows:
        print(f"warning: infeasible rows {report.infeasible_rows}", file=sys.stderr)
    return 0


COMMANDS = {"generate": cmd_generate, "optimize": cmd_optimize,
            "verify": cmd_verify, "taguchi": cmd_taguchi}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, OracleSizeError, ValueError, TypeError, OSError) as exc:
        print(f"qabc-offload {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
