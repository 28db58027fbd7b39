"""Command-line entry point: ``rainbowpack {pack,cover,knapsack,binpack,bench}``.

Exit codes: 0 success, 2 input error, 3 randomized failure after retries.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from . import generators, oracles, solver_bp_det, solver_vc, solver_vmkp, solver_vp
from .algebra import CapacityError
from .model import Assignment, Instance, InstanceError, RandomizedFailure, parse_instance, validate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RANDOMIZED = 3

PROBLEMS = ("pack", "cover", "knapsack", "binpack")
MODE = {"pack": "pack", "cover": "cover", "knapsack": "knapsack", "binpack": "pack"}
CSV_COLUMNS = ("problem", "n", "d", "k", "seed", "wall_time", "objective")


def _jsonable(obj):
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)


def _dumps(data) -> str:
    return json.dumps(data, separators=(",", ":"), default=_jsonable)


def solve_instance(problem: str, instance: Instance, seed: int = 0, exponent: float = 2.0,
                   deterministic: bool = False, use_oracle: bool = False,
                   retries: int = 3) -> Assignment:
    if use_oracle:
        return oracles.ORACLES[problem](instance)
    if problem == "pack":
        return solver_vp.solve(instance, seed, exponent, retries=retries)
    if problem == "cover":
        return solver_vc.solve(instance, seed, exponent, retries=retries)
    if problem == "knapsack":
        return solver_vmkp.solve(instance, seed, exponent, retries=retries)
    if problem == "binpack":
        if instance.dimension != 1:
            raise InstanceError("binpack needs a one-dimensional instance")
        if deterministic:
            return solver_bp_det.solve(instance)
        return solver_vp.solve(instance, seed, exponent, retries=retries)
    raise ValueError(problem)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rainbowpack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in PROBLEMS:
        p = sub.add_parser(name, help=f"solve a {name} instance")
        p.add_argument("input", help="instance JSON file, or - for stdin")
        p.add_argument("--seed", type=int, default=0, help="64-bit seed for the randomized engine")
        p.add_argument("--error-exponent", type=float, default=2.0,
                       help="false-negative rate is at most (n + budget) ** -c")
        p.add_argument("--retries", type=int, default=3)
        p.add_argument("--oracle", action="store_true", help="use the exhaustive reference solver")
        p.add_argument("--emit-certificate", action="store_true",
                       help="also print the validation report and the accepting guess")
        p.add_argument("--format", choices=("json", "text"), default="json")
        if name == "binpack":
            p.add_argument("--deterministic", action="store_true",
                           help="use the deterministic branching solver")
    b = sub.add_parser("bench", help="run a benchmark spec and write CSV")
    b.add_argument("spec", help="benchmark spec JSON file, or - for stdin")
    b.add_argument("-o", "--output", help="CSV path (default stdout)")
    return parser


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _render(args, instance: Instance, result: Assignment) -> str:
    data = result.to_json()
    if args.emit_certificate:
        report = validate(instance, result, MODE[args.command])
        data["certificate"] = {"validation": report.to_json(), "trace": result.trace}
    if args.format == "json":
        return _dumps(data)
    lines = [f"objective {data['objective']}",
             "placement " + " ".join("-" if c is None else str(c) for c in data["placement"])]
    if args.emit_certificate:
        lines.append("valid " + str(data["certificate"]["validation"]["valid"]).lower())
        lines.append("trace " + _dumps(result.trace))
    return "\n".join(lines)


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "bench":
        return bench(args)
    try:
        instance = parse_instance(_read(args.input))
        if args.seed < 0 or args.seed >= 2**64:
            raise InstanceError("seed must fit in 64 unsigned bits")
        if args.command == "knapsack" and (instance.profits is None or instance.containers is None):
            raise InstanceError("knapsack instances need profits and containers")
        result = solve_instance(args.command, instance, args.seed, args.error_exponent,
                                getattr(args, "deterministic", False), args.oracle, args.retries)
    except (OSError, InstanceError, CapacityError) as exc:
        print(f"rainbowpack: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RandomizedFailure as exc:
        print(f"rainbowpack: randomized failure: {exc} {_dumps(exc.context)}", file=sys.stderr)
        return EXIT_RANDOMIZED
    print(_render(args, instance, result))
    return EXIT_OK


def _bench_instance(row: dict, seed: int) -> Instance:
    rng = random.Random(seed)
    problem, n, d, k = row["problem"], row["n"], row["d"], row["k"]
    if problem in ("pack", "binpack"):
        return generators.pairable_instance(rng, n, k, d)
    if problem == "cover":
        return generators.cover_instance(rng, n + k, d, k)
    return generators.mixed_instance(rng, n + k, d, k, profits=True,
                                     containers=row.get("containers", 3))


def _bench_rows(spec) -> list[dict]:
    if not isinstance(spec, dict) or not isinstance(spec.get("runs", []), list):
        raise InstanceError("bench spec must be an object with a 'runs' array")
    rows = []
    for run_spec in spec.get("runs", []):
        if not isinstance(run_spec, dict) or run_spec.get("problem") not in PROBLEMS:
            raise InstanceError(f"bad run entry: {run_spec!r}")
        for key in ("n", "k"):
            if not isinstance(run_spec.get(key), int) or run_spec[key] < 0:
                raise InstanceError(f"run entry needs a non-negative integer {key!r}")
        d = run_spec.get("d", 1)
        reps = run_spec.get("repetitions", 1)
        seeds = run_spec.get("seeds", [0])
        if (not isinstance(d, int) or d < 1 or not isinstance(reps, int) or reps < 1
                or not isinstance(seeds, list) or not all(isinstance(s, int) for s in seeds)):
            raise InstanceError(f"bad run entry: {run_spec!r}")
        for seed in seeds:
            for _ in range(reps):
                rows.append(dict(run_spec, d=d, seed=seed))
    return rows


def _bench_one(row: dict) -> dict:
    instance = _bench_instance(row, row["seed"])
    start = time.perf_counter()
    result = solve_instance(row["problem"], instance, row["seed"],
                            deterministic=bool(row.get("deterministic", False)))
    elapsed = time.perf_counter() - start
    return {"problem": row["problem"], "n": row["n"], "d": row["d"], "k": row["k"],
            "seed": row["seed"], "wall_time": f"{elapsed:.6f}", "objective": result.objective}


def bench(args) -> int:
    try:
        rows = _bench_rows(json.loads(_read(args.spec) or b"{}"))
    except (OSError, ValueError) as exc:
        print(f"rainbowpack: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        threads = max(1, int(os.environ.get("RAINBOWPACK_THREADS", "1") or 1))
    except ValueError:
        print("rainbowpack: RAINBOWPACK_THREADS must be an integer", file=sys.stderr)
        return EXIT_INPUT
    try:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_bench_one, rows))
    except RandomizedFailure as exc:
        print(f"rainbowpack: randomized failure: {exc}", file=sys.stderr)
        return EXIT_RANDOMIZED
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(results)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
