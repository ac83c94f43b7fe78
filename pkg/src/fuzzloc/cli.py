"""Benchmark command line: generate, solve, bench, tune, validate.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 validation failure.
The enumeration budget can be overridden with FUZZLOC_ENUM_BUDGET.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .aco import ACOConfig, run_aco
from .errors import BudgetExceededError, DomainError, InfeasibleInstanceError, InstanceFormatError
from .evaluation import MaximinContext, make_maximin_eval
from .fuzzy import TriFuzzy
from .ga import GAConfig
from .instances import (
    GeneratorParams,
    generate_instance,
    load_instance,
    load_table1,
    save_instance,
    table1_bytes,
)
from .model import Instance, Solution, crisp_objective_slice, mm1_metrics
from .oracle import DEFAULT_ENUM_BUDGET, enumerate_optimum, mm1_simulate, simulate_objective_slice
from .protocol import estimate_bounds, solve_protocol

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VALIDATION = 3

BENCH_HEADER = [
    "algorithm", "instance", "n", "m", "seed", "objective",
    "runtime_ms", "facilities", "termination", "bounds_id",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return format(value, ".12g")


def _enum_budget() -> int:
    raw = os.environ.get("FUZZLOC_ENUM_BUDGET")
    return int(raw) if raw else DEFAULT_ENUM_BUDGET


def _load(path: str, gamma=None, logit=None) -> Instance:
    instance = load_instance(path)
    if gamma is not None or logit is not None:
        import dataclasses

        instance = dataclasses.replace(
            instance,
            gamma=instance.gamma if gamma is None else gamma,
            logit_sensitivity=instance.logit_sensitivity if logit is None else logit,
        )
    return instance


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzloc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random or fixture instance file")
    gen.add_argument("--n", type=int, default=20)
    gen.add_argument("--m", type=int, default=5)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--table1", action="store_true", help="write the 20-node fixture instead")
    gen.add_argument("--demand-lo", type=int, nargs=2, default=[4, 80], metavar=("MIN", "MAX"))
    gen.add_argument("--demand-offsets", type=int, nargs=2, default=[50, 100])
    gen.add_argument("--service-lo", type=int, nargs=2, default=[144, 190], metavar=("MIN", "MAX"))
    gen.add_argument("--service-offsets", type=int, nargs=2, default=[50, 100])
    gen.add_argument("--distance", type=int, nargs=2, default=[1, 35], metavar=("MIN", "MAX"))
    gen.add_argument("--idle-min", type=float, nargs=3, default=[0.1, 0.15, 0.2])
    gen.add_argument("--mql", type=float, default=25.0)
    gen.add_argument("--gamma", type=float, default=0.5)
    gen.add_argument("--logit", type=float, default=0.5)

    slv = sub.add_parser("solve", help="run the full 7-run protocol on one instance")
    slv.add_argument("--instance", required=True)
    slv.add_argument("--algo", choices=("ga", "aco", "brute"), default="ga")
    slv.add_argument("--seed", type=int, default=0)
    slv.add_argument("--out", help="result file (report + bound context JSON)")
    slv.add_argument("--exact-bounds", action="store_true")
    slv.add_argument("--bounds", help="replay bounds from a prior result file")
    slv.add_argument("--gamma", type=float)
    slv.add_argument("--logit", type=float)

    ben = sub.add_parser("bench", help="paired GA/ACO replications over shared seeds")
    ben.add_argument("--instance", action="append", required=True)
    ben.add_argument("--replications", type=int, default=5)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--out", required=True, help="CSV output path")
    ben.add_argument("--exact-bounds", action="store_true")
    ben.add_argument("--gamma", type=float)
    ben.add_argument("--logit", type=float)

    tun = sub.add_parser("tune", help="full-factorial grid over ACO parameters")
    tun.add_argument("--instance", required=True)
    tun.add_argument("--seeds", type=int, nargs="+", default=[0])
    tun.add_argument("--out", required=True)
    tun.add_argument("--evaporation", type=float, nargs="+", default=[0.95, 0.99])
    tun.add_argument("--max-pheromone", type=float, nargs="+", default=[150, 250])
    tun.add_argument("--coefficient", type=int, nargs="+", default=[1, 3])
    tun.add_argument("--alpha", type=float, nargs="+", default=[0.5, 1])
    tun.add_argument("--beta", type=float, nargs="+", default=[0.5, 1])
    tun.add_argument("--exact-bounds", action="store_true")

    val = sub.add_parser("validate", help="check analytic queue formulas against simulation")
    val.add_argument("--events", type=int, default=10**6)
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--rho", type=float, nargs="+", default=[0.3, 0.5, 0.8])
    val.add_argument("--tolerance", type=float, default=0.02)
    val.add_argument("--network-events", type=int, default=200_000)
    val.add_argument("--network-tolerance", type=float, default=0.05)
    val.add_argument("--skip-network", action="store_true")
    return parser


def cmd_generate(args) -> int:
    if args.table1:
        Path(args.out).write_bytes(table1_bytes())
        print(f"wrote table1 fixture to {args.out}")
        return EXIT_OK
    params = GeneratorParams(
        n=args.n,
        m_servers=args.m,
        demand_lo_range=tuple(args.demand_lo),
        demand_offsets=tuple(args.demand_offsets),
        service_lo_range=tuple(args.service_lo),
        service_offsets=tuple(args.service_offsets),
        distance_range=tuple(args.distance),
        idle_min=TriFuzzy(*args.idle_min),
        mql=args.mql,
        gamma=args.gamma,
        logit_sensitivity=args.logit,
        seed=args.seed,
    )
    save_instance(generate_instance(params), args.out)
    print(f"wrote n={args.n} m={args.m} instance to {args.out}")
    return EXIT_OK


def _result_doc(report, ctx: MaximinContext) -> str:
    doc = {"report": report.to_dict(), "bounds": ctx.to_dict(), "bounds_id": ctx.bounds_id}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cmd_solve(args) -> int:
    instance = _load(args.instance, args.gamma, args.logit)
    if args.bounds:
        prior = json.loads(Path(args.bounds).read_text())
        ctx = MaximinContext.from_dict(prior["bounds"])
        fitness = make_maximin_eval(instance, ctx)
        if args.algo == "brute":
            result = enumerate_optimum(instance, fitness, budget=_enum_budget())
            from .reports import SolverReport

            report = SolverReport(
                algorithm="brute", n=instance.n, m=instance.m_servers, seed=args.seed,
                best=result.best.sorted(), objective=result.best_value,
                iterations=result.evaluated_count, termination="exhaustive",
                trace=[result.best_value], bounds_id=ctx.bounds_id,
            )
        else:
            from .ga import run_ga

            if args.algo == "ga":
                report = run_ga(instance, fitness, GAConfig(seed=args.seed))
            else:
                report = run_aco(instance, fitness, ACOConfig(seed=args.seed))
            report.bounds_id = ctx.bounds_id
    else:
        report, ctx = solve_protocol(
            instance,
            args.algo,
            seed=args.seed,
            use_exact_bounds=args.exact_bounds,
            enum_budget=_enum_budget(),
        )
    if args.out:
        Path(args.out).write_text(_result_doc(report, ctx))
    facilities = ",".join(str(j) for j in report.best)
    print(f"algorithm   : {report.algorithm}")
    print(f"objective   : {_fmt(report.objective)}")
    print(f"facilities  : {facilities}")
    print(f"iterations  : {report.iterations} ({report.termination})")
    print(f"runtime     : {report.elapsed_s * 1000:.1f} ms")
    print(f"bounds      : {ctx.provenance} ({ctx.bounds_id})")
    return EXIT_OK


def _bench_rows(args):
    rows = []
    for inst_path in args.instance:
        instance = _load(inst_path, args.gamma, args.logit)
        name = Path(inst_path).stem
        for algo in ("ga", "aco"):
            for rep in range(args.replications):
                seed = args.seed + rep
                try:
                    report, ctx = solve_protocol(
                        instance, algo, seed=seed,
                        use_exact_bounds=args.exact_bounds,
                        enum_budget=_enum_budget(),
                    )
                    rows.append({
                        "algorithm": algo, "instance": name,
                        "n": instance.n, "m": instance.m_servers, "seed": seed,
                        "objective": report.objective,
                        "runtime_ms": report.elapsed_s * 1000.0,
                        "facilities": ";".join(str(j) for j in report.best),
                        "termination": report.termination,
                        "bounds_id": ctx.bounds_id,
                    })
                except (DomainError, InfeasibleInstanceError, BudgetExceededError) as exc:
                    rows.append({
                        "algorithm": algo, "instance": name,
                        "n": instance.n, "m": instance.m_servers, "seed": seed,
                        "objective": math.nan, "runtime_ms": math.nan,
                        "facilities": "", "termination": f"error:{exc}",
                        "bounds_id": "",
                    })
    return rows


def cmd_bench(args) -> int:
    rows = _bench_rows(args)
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_HEADER)
        for row in rows:
            writer.writerow([
                row["algorithm"], row["instance"], row["n"], row["m"], row["seed"],
                _fmt(row["objective"]), _fmt(row["runtime_ms"]),
                row["facilities"], row["termination"], row["bounds_id"],
            ])
    # per-(instance, algorithm) means feed the summary and the plot data
    summary: dict[tuple[str, str], dict] = {}
    for row in rows:
        key = (row["instance"], row["algorithm"])
        entry = summary.setdefault(key, {"n": row["n"], "objectives": [], "runtimes": []})
        if not math.isnan(row["objective"]):
            entry["objectives"].append(row["objective"])
            entry["runtimes"].append(row["runtime_ms"])
    for suffix, field in (("runtime_vs_n", "runtimes"), ("objective_vs_n", "objectives")):
        plot_path = out.with_name(out.stem + f"_{suffix}.csv")
        with plot_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "algorithm", "mean_" + field[:-1]])
            for (name, algo), entry in sorted(summary.items()):
                mean = float(np.mean(entry[field])) if entry[field] else math.nan
                writer.writerow([entry["n"], algo, _fmt(mean)])
    instances = sorted({name for name, _ in summary})
    for name in instances:
        ga = summary.get((name, "ga"), {"objectives": [], "runtimes": []})
        aco = summary.get((name, "aco"), {"objectives": [], "runtimes": []})
        if not ga["objectives"] or not aco["objectives"]:
            print(f"{name}: incomplete results")
            continue
        ga_obj, aco_obj = float(np.mean(ga["objectives"])), float(np.mean(aco["objectives"]))
        ga_rt, aco_rt = float(np.mean(ga["runtimes"])), float(np.mean(aco["runtimes"]))
        gap = (ga_obj - aco_obj) / ga_obj * 100.0 if ga_obj != 0 else math.nan
        print(
            f"{name}: GA obj {_fmt(ga_obj)} ({ga_rt:.0f} ms) | "
            f"ACO obj {_fmt(aco_obj)} ({aco_rt:.0f} ms) | gap {gap:.2f}%"
        )
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_tune(args) -> int:
    instance = _load(args.instance)
    cells = [
        (ev, ph, co, al, be)
        for ev in args.evaporation
        for ph in args.max_pheromone
        for co in args.coefficient
        for al in args.alpha
        for be in args.beta
    ]
    contexts = {}
    for seed in args.seeds:
        if args.exact_bounds:
            contexts[seed] = estimate_bounds(instance, "oracle", [], enum_budget=_enum_budget())
        else:
            contexts[seed] = estimate_bounds(
                instance, "aco", [seed + k for k in range(1, 7)]
            )
    out = Path(args.out)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "evaporation_rate", "max_pheromone", "population_coefficient",
            "alpha_exp", "beta_exp", "mean_objective",
        ])
        for ev, ph, co, al, be in cells:
            values = []
            for seed in args.seeds:
                config = ACOConfig(
                    evaporation_rate=ev, max_pheromone=ph, population_coefficient=co,
                    alpha_exp=al, beta_exp=be, seed=seed,
                )
                report = run_aco(instance, make_maximin_eval(instance, contexts[seed]), config)
                values.append(report.objective)
            writer.writerow([_fmt(ev), _fmt(ph), co, _fmt(al), _fmt(be),
                             _fmt(float(np.mean(values)))])
    print(f"wrote {len(cells)} cells to {out}")
    return EXIT_OK


def _builtin_validation_instance() -> Instance:
    # small, comfortably stable instance for the network cross-check
    return generate_instance(GeneratorParams(
        n=6, m_servers=2,
        demand_lo_range=(4, 30), demand_offsets=(10, 20),
        seed=123,
    ))


def cmd_validate(args) -> int:
    mu = 100.0
    enforce = True
    if args.events < 10_000:
        print(
            f"warning: event budget {args.events} is below 10000; "
            "tolerance is not enforceable and will not be checked"
        )
        enforce = False
    failures = 0
    print("rho    quantity  analytic   simulated  rel_err   tolerance  verdict")
    for rho in args.rho:
        lam = rho * mu
        analytic = mm1_metrics(lam, mu)
        if analytic is None:
            print(f"{rho:<6.3g} skipped (unstable)")
            continue
        # SE of queue estimates blows up as rho -> 1; relax relative to rho=0.8
        relax = max(1.0, (1.0 / (1.0 - rho)) / (1.0 / (1.0 - 0.8)))
        tol = args.tolerance * relax
        sim = mm1_simulate(lam, mu, max(args.events, 1), seed=args.seed)
        for label, ref, est in (("P0", analytic[0], sim.p0), ("Lq", analytic[1], sim.lq)):
            rel = abs(est - ref) / abs(ref)
            ok = rel <= tol
            if enforce and not ok:
                failures += 1
            print(
                f"{rho:<6.3g} {label:<9} {ref:<10.5f} {est:<10.5f} "
                f"{rel:<9.5f} {tol:<10.5f} {'pass' if ok else 'FAIL'}"
            )
        if relax > 1:
            print(f"       (tolerance relaxed x{relax:.1f} for rho={rho:g})")
    if not args.skip_network:
        instance = _builtin_validation_instance()

        def mid_objective(solution: Solution) -> float:
            value = crisp_objective_slice(instance, solution, "mid")
            return -math.inf if value is None else value

        best = enumerate_optimum(instance, mid_objective).best
        analytic_obj = crisp_objective_slice(instance, best, "mid")
        sim_obj = simulate_objective_slice(
            instance, best, "mid", max(args.network_events, 10_000), seed=args.seed
        )
        rel = abs(sim_obj - analytic_obj) / abs(analytic_obj)
        ok = rel <= args.network_tolerance
        if enforce and not ok:
            failures += 1
        print(
            f"network objective (mid slice, facilities {best}): analytic "
            f"{analytic_obj:.4f}, simulated {sim_obj:.4f}, rel_err {rel:.5f} "
            f"-> {'pass' if ok else 'FAIL'}"
        )
    if failures:
        print(f"validation FAILED ({failures} breaches)")
        return EXIT_VALIDATION
    print("validation passed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "generate": cmd_generate,
        "solve": cmd_solve,
        "bench": cmd_bench,
        "tune": cmd_tune,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, InstanceFormatError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleInstanceError, BudgetExceededError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
