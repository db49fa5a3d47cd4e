"""Batch harness: generate instances, run solvers, compare, simulate.

All result documents are deterministic functions of the flags: run seeds
derive from ``--seed`` plus the run index, and wall-clock timings go to
stderr only, so re-running a command reproduces its outputs byte for byte.

Exit codes: 0 success, 1 usage error, 2 infeasible input or parse error.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .baselines import exhaustive_solve, plain_ts_run, vns_run
from .construct import greedy_insert
from .instances import (
    Instance,
    InfeasibleInstanceError,
    InstanceFormatError,
    SolomonFormatError,
    extend_instance,
    load_instance,
    parse_solomon,
    save_instance,
)
from .plans import evaluate, load_plan, plan_table, save_plan, service_probability
from .simulate import comparison_text, simulate_plan
from .tabu import SearchParams, its_run

ALGORITHMS = ("its", "ts", "vns", "greedy", "exact")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; our contract reserves 2 for
    # infeasible inputs, so route usage problems through an exception
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="amrsched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="extend a Solomon base into an instance file")
    gen.add_argument("--solomon", required=True, help="Solomon-format base file")
    gen.add_argument(
        "--period",
        required=True,
        choices=("P1", "P2", "P3", "day"),
        help="constant-speed period, or 'day' for the five-zone timetable",
    )
    gen.add_argument("--n", required=True, type=int, help="number of requests")
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--time-scale", type=float, default=1.0)
    gen.add_argument("--out", help="output path (default: <label>.json in cwd)")

    def add_search_flags(p):
        p.add_argument("--runs", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--iterations", type=int, default=500)
        p.add_argument("--tenure", type=int, default=40)
        p.add_argument("--delta1", type=float, default=1.0)
        p.add_argument("--delta2", type=float, default=0.2)
        p.add_argument("--scan", choices=("full", "sampled"), default="full")
        p.add_argument("--sample-size", type=int, default=150)
        p.add_argument("--kick-after", type=int, default=25)
        p.add_argument("--kick-width", type=int, default=8)
        p.add_argument("--decrement", choices=("verbatim", "uniform"), default="verbatim")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", help="result document path (default: stdout)")

    sol = sub.add_parser("solve", help="run one solver on one instance")
    sol.add_argument("--instance", required=True)
    sol.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    add_search_flags(sol)
    sol.add_argument("--curve-out", help="fitness curve CSV path (per run)")
    sol.add_argument("--plan-out", help="write the best run's plan document here")

    cmp_ = sub.add_parser("compare", help="gap table of algorithms against the full solver")
    cmp_.add_argument("--instance", required=True, action="append", help="repeatable")
    cmp_.add_argument(
        "--algorithm",
        action="append",
        choices=("its", "ts", "vns", "greedy"),
        help="algorithms to gap against the full solver (default: ts vns greedy)",
    )
    add_search_flags(cmp_)

    sim = sub.add_parser("simulate", help="Monte Carlo check of a plan against the analytic model")
    sim.add_argument("--instance", required=True)
    sim.add_argument("--plan", required=True)
    sim.add_argument("--mc-samples", type=int, default=100_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", help="report path (default: stdout)")

    return parser


def _load_instance_file(path: str) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {path}: {exc}") from exc
    return load_instance(text)


def _params_from(args, run_index: int) -> SearchParams:
    return SearchParams(
        iterations=args.iterations,
        tenure=args.tenure,
        delta1=args.delta1,
        delta2=args.delta2,
        seed=args.seed + run_index,
        scan=args.scan,
        sample_size=args.sample_size,
        kick_after=args.kick_after,
        kick_width=args.kick_width,
        decrement=args.decrement,
    )


def _run_single(job):
    """One (instance, algorithm, run) execution; used by the process pool."""
    index, inst, algorithm, params = job
    t0 = time.perf_counter()
    if algorithm == "its":
        res = its_run(inst, params)
        plan, cost, curve = res.plan, res.cost, res.curve
    elif algorithm == "ts":
        res = plain_ts_run(inst, params)
        plan, cost, curve = res.plan, res.cost, res.curve
    elif algorithm == "vns":
        res = vns_run(inst, params)
        plan, cost, curve = res.plan, res.cost, res.curve
    elif algorithm == "greedy":
        plan = greedy_insert(inst)
        cost = evaluate(plan, inst)
        curve = [(0, cost.total)]
    elif algorithm == "exact":
        plan, cost = exhaustive_solve(inst)
        curve = [(0, cost.total)]
    else:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    wall = time.perf_counter() - t0
    r, _ = service_probability(plan, inst)
    return index, {
        "seed": params.seed,
        "plan": plan,
        "cost": cost,
        "curve": curve,
        "m": plan.m,
        "r": r,
        "wall": wall,
    }


def _run_many(inst: Instance, algorithm: str, args) -> list[dict]:
    jobs = [
        (k, inst, algorithm, _params_from(args, k)) for k in range(args.runs)
    ]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            indexed = list(pool.map(_run_single, jobs))
    else:
        indexed = [_run_single(job) for job in jobs]
    indexed.sort(key=lambda kv: kv[0])
    return [row for _, row in indexed]


def _echo_search_flags(args) -> list[str]:
    return [
        f"runs\t{args.runs}",
        f"seed\t{args.seed}",
        f"iterations\t{args.iterations}",
        f"tenure\t{args.tenure}",
        f"delta1\t{args.delta1:.6f}",
        f"delta2\t{args.delta2:.6f}",
        f"scan\t{args.scan}",
        f"sample_size\t{args.sample_size}",
        f"kick_after\t{args.kick_after}",
        f"kick_width\t{args.kick_width}",
        f"decrement\t{args.decrement}",
    ]


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _curve_path(base: str, run_index: int, runs: int) -> Path:
    p = Path(base)
    if runs == 1:
        return p
    return p.with_name(f"{p.stem}-run{run_index}{p.suffix}")


def cmd_generate(args) -> int:
    try:
        text = Path(args.solomon).read_text()
    except OSError as exc:
        raise SolomonFormatError(f"cannot read {args.solomon}: {exc}") from exc
    raw = parse_solomon(text)
    inst = extend_instance(
        raw, period=args.period, n=args.n, seed=args.seed, time_scale=args.time_scale
    )
    out = args.out if args.out else f"{inst.label}.json"
    Path(out).write_text(save_instance(inst))
    print(out)
    return 0


def cmd_solve(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    inst = _load_instance_file(args.instance)
    rows = _run_many(inst, args.algorithm, args)
    totals = [row["cost"].total for row in rows]
    best_index = min(range(len(rows)), key=lambda k: totals[k])
    lines = ["# amrsched solve", f"instance\t{inst.label}", f"algorithm\t{args.algorithm}"]
    lines += _echo_search_flags(args)
    lines.append("")
    lines.append("run\tseed\ttotal\tfixed\tpenalty\ttravel\tm\tr")
    for k, row in enumerate(rows):
        c = row["cost"]
        lines.append(
            f"{k}\t{row['seed']}\t{c.total:.6f}\t{c.fixed:.6f}\t{c.penalty:.6f}"
            f"\t{c.travel:.6f}\t{row['m']}\t{row['r']:.6f}"
        )
    lines.append("")
    lines.append(f"F_bst\t{min(totals):.6f}")
    lines.append(f"F_avg\t{statistics.fmean(totals):.6f}")
    lines.append(f"best_run\t{best_index}")
    lines.append("")
    lines.append(plan_table(rows[best_index]["plan"], inst).rstrip("\n"))
    _write_out("\n".join(lines) + "\n", args.out)

    if args.curve_out:
        for k, row in enumerate(rows):
            path = _curve_path(args.curve_out, k, args.runs)
            csv = "iteration,best_total\n" + "".join(
                f"{it},{val:.6f}\n" for it, val in row["curve"]
            )
            path.write_text(csv)
    if args.plan_out:
        Path(args.plan_out).write_text(save_plan(rows[best_index]["plan"], inst))

    for k, row in enumerate(rows):
        print(f"run {k}: {row['wall']:.3f}s", file=sys.stderr)
    mean_wall = statistics.fmean(row["wall"] for row in rows)
    print(f"mean wall-clock: {mean_wall:.3f}s", file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    algorithms = args.algorithm if args.algorithm else ["ts", "vns", "greedy"]
    lines = ["# amrsched compare"]
    lines += _echo_search_flags(args)
    lines.append("")
    header = ["instance", "F_its"]
    for alg in algorithms:
        header += [f"F_{alg}", f"G_{alg}"]
    lines.append("\t".join(header))
    gap_sums = {alg: [] for alg in algorithms}
    walls = []
    for path in args.instance:
        inst = _load_instance_file(path)
        t0 = time.perf_counter()
        its_rows = _run_many(inst, "its", args)
        f_its = statistics.fmean(row["cost"].total for row in its_rows)
        cells = [inst.label, f"{f_its:.6f}"]
        for alg in algorithms:
            rows = _run_many(inst, alg, args)
            f_alg = statistics.fmean(row["cost"].total for row in rows)
            gap = (f_alg - f_its) / f_its * 100.0
            gap_sums[alg].append(gap)
            cells += [f"{f_alg:.6f}", f"{gap:.3f}"]
        walls.append(time.perf_counter() - t0)
        lines.append("\t".join(cells))
    avg = ["Average", ""]
    for alg in algorithms:
        avg += ["", f"{statistics.fmean(gap_sums[alg]):.3f}"]
    lines.append("\t".join(avg))
    _write_out("\n".join(lines) + "\n", args.out)
    for path, wall in zip(args.instance, walls):
        print(f"{path}: {wall:.3f}s", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    if args.mc_samples < 1:
        raise UsageError("--mc-samples must be at least 1")
    inst = _load_instance_file(args.instance)
    try:
        plan_text = Path(args.plan).read_text()
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {args.plan}: {exc}") from exc
    plan = load_plan(plan_text)
    try:
        plan.validate(inst)
    except KeyError as exc:
        raise InstanceFormatError(f"plan does not match instance: {exc}") from exc
    report = simulate_plan(plan, inst, samples=args.mc_samples, seed=args.seed)
    _write_out(comparison_text(plan, inst, report), args.out)
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (
        SolomonFormatError,
        InstanceFormatError,
        InfeasibleInstanceError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
