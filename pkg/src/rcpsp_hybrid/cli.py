"""Command-line interface: solve, bench, rank and validate subcommands."""

from __future__ import annotations

import argparse
import os
import sys

from .bench import (
    compare_bounds,
    format_table,
    read_bounds_csv,
    run_benchmark,
)
from .model import validate_instance
from .psplib import load_dataset, parse_sm
from .ranking import assign_weights, rank_resources, solve_cumulative_relaxation
from .solver import SolverConfig, solve


class InputError(Exception):
    pass


def _load_instance(path: str):
    if not os.path.isfile(path):
        raise InputError(f"no such file: {path}")
    with open(path, encoding="utf-8", errors="replace") as fh:
        text = fh.read()
    try:
        return parse_sm(text, name=os.path.splitext(os.path.basename(path))[0])
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _build_config(args) -> SolverConfig:
    if getattr(args, "config", None):
        if not os.path.isfile(args.config):
            raise InputError(f"no such config file: {args.config}")
        config = SolverConfig.from_file(args.config)
    else:
        config = SolverConfig()
    overrides = {}
    if getattr(args, "lam", None) is not None:
        overrides["lambda_budget"] = args.lam
    if getattr(args, "time_limit", None) is not None:
        overrides["time_limit"] = args.time_limit
        if getattr(args, "lam", None) is None:
            overrides["lambda_budget"] = None
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    return config


def cmd_solve(args) -> int:
    inst = _load_instance(args.file)
    config = _build_config(args)
    sched, stats = solve(inst, config)
    print(f"instance      : {inst.name or args.file}")
    print(f"makespan      : {sched.makespan}")
    print(f"cp lower bound: {stats.cp_bound}")
    print(f"subset        : {stats.subset}")
    print(f"schedules     : {stats.schedules_generated}")
    print(f"seconds       : {stats.seconds:.2f}")
    if args.starts:
        print("starts        :", " ".join(map(str, sched.starts)))
    return 0


def cmd_bench(args) -> int:
    if not os.path.isdir(args.directory):
        raise InputError(f"no such directory: {args.directory}")
    config = _build_config(args)
    try:
        report = run_benchmark(
            args.directory,
            config,
            out_path=args.out,
            csv_path=args.csv,
            threads=args.threads,
        )
    except (FileNotFoundError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    print(format_table(report))
    if args.bounds:
        if not os.path.isfile(args.bounds):
            raise InputError(f"no such bounds file: {args.bounds}")
        improvements = compare_bounds(report, read_bounds_csv(args.bounds))
        if improvements:
            print("improved over best known:")
            for name, achieved, known in improvements:
                print(f"  {name}: {achieved} < {known}")
        else:
            print("no improvements over best known bounds")
    return 0


def cmd_rank(args) -> int:
    inst = _load_instance(args.file)
    sched, residues = solve_cumulative_relaxation(inst)
    rank = rank_resources(residues, inst.capacities, sched.makespan)
    weights = assign_weights(rank, residues, mode="ratio")
    print(f"instance          : {inst.name or args.file}")
    print(f"relaxed makespan  : {sched.makespan}")
    print(f"residues          : {' '.join(map(str, residues))}")
    print(f"rank (scarce 1st) : {' '.join(str(k + 1) for k in rank)}")
    print(f"ratio weights     : {' '.join(f'{w:.3f}' for w in weights)}")
    return 0


def cmd_validate(args) -> int:
    target = args.path
    if os.path.isdir(target):
        try:
            pairs = load_dataset(target)
        except (FileNotFoundError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        bad = 0
        for name, inst in pairs:
            problem = validate_instance(inst)
            if problem is None:
                print(f"{name}: ok")
            else:
                print(f"{name}: {problem}")
                bad += 1
        if bad:
            raise InputError(f"{bad} invalid instance(s)")
        return 0
    inst = _load_instance(target)
    problem = validate_instance(inst)
    if problem is not None:
        raise InputError(problem)
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcpsp-hybrid",
        description="Hybrid GA + neighborhood-search RCPSP solver and benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a single .sm instance")
    p_solve.add_argument("file")
    p_solve.add_argument("--lambda", dest="lam", type=int, help="schedule budget")
    p_solve.add_argument("--time-limit", type=float, help="wall-clock cap in seconds")
    p_solve.add_argument("--seed", type=int)
    p_solve.add_argument("--config", help="key = value config file")
    p_solve.add_argument("--starts", action="store_true", help="print the start vector")
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="benchmark a dataset directory")
    p_bench.add_argument("directory")
    p_bench.add_argument("--lambda", dest="lam", type=int)
    p_bench.add_argument("--time-limit", type=float)
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--config")
    p_bench.add_argument("--threads", type=int, default=1)
    p_bench.add_argument("--out", help="makespan file path")
    p_bench.add_argument("--csv", help="machine-readable summary path")
    p_bench.add_argument("--bounds", help="CSV of (instance, best-known)")
    p_bench.set_defaults(func=cmd_bench)

    p_rank = sub.add_parser("rank", help="print relaxation makespan, residues, ranks, weights")
    p_rank.add_argument("file")
    p_rank.set_defaults(func=cmd_rank)

    p_validate = sub.add_parser("validate", help="validate an instance file or directory")
    p_validate.add_argument("path")
    p_validate.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
