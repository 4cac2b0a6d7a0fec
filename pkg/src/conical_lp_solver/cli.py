"""
The conical-lp command line: feasibility and LP solves on JSON problem files,
seeded instance generation, the brute-force oracle and the benchmark harness.

Exit codes: 0 success, 1 infeasible, 2 unsupported (strict tangency),
3 numerical failure, 64 malformed input.
"""

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable
from pathlib import Path

import numpy as np

from conical_lp_solver.benchmark import (
    load_suite,
    run_benchmark,
    run_solver,
    save_results,
    summarise,
)
from conical_lp_solver.data import ProblemFile, ResultFile, dumps, load_problem
from conical_lp_solver.exceptions import (
    ConicalSolverError,
    DimensionTooLargeError,
    InfeasibleProblemError,
    MalformedProblemError,
    NotStrictlyTangentError,
)
from conical_lp_solver.feasibility import (
    contact_polytope,
    relative_interior_point,
    solutions_from_generators,
    solve_feasibility,
)
from conical_lp_solver.instances import generate_problem
from conical_lp_solver.linalg import solve_consistent
from conical_lp_solver.lp_solver import LpStatus
from conical_lp_solver.models import create_session
from conical_lp_solver.oracle import oracle_solve
from conical_lp_solver.utils import (
    DEFAULT_BENCH_WORKERS,
    INSTANCE_KINDS,
    SOLVER_MODES,
    logger,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_UNSUPPORTED = 2
EXIT_NUMERICAL = 3
EXIT_MALFORMED = 64


class _Parser(argparse.ArgumentParser):
    """Reports usage errors with the malformed-input exit code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_MALFORMED)


def _rows(values: list[np.ndarray]) -> list[list[float]]:
    return [np.asarray(value, dtype=float).tolist() for value in values]


def _emit(result: ResultFile | ProblemFile, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(dumps(result))
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(dumps(result))


def _elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def cmd_feas(args: argparse.Namespace) -> int:
    """Runs the feasibility algorithm on a problem file."""
    start = time.perf_counter()
    problem = load_problem(args.input)
    tol = problem.tolerance(args.tol)
    p = problem.feasibility_problem()
    outcome = solve_feasibility(p, tol, want_all=args.all)
    stats = {"rays_enumerated": outcome.rays_enumerated, "steps": 0}

    if not outcome.is_feasible:
        result = ResultFile(
            status="infeasible",
            reason=str(outcome.infeasible_case),
            witness=None if outcome.witness is None else outcome.witness.y.tolist(),
            stats=stats | {"wall_ms": _elapsed_ms(start)},
        )
        _emit(result, args.output)
        return EXIT_INFEASIBLE

    x = outcome.x
    result = ResultFile(
        status="feasible",
        x=x.tolist(),
        y=(p.v - p.G @ x).tolist(),
        reason=None if outcome.trivial_reason is None else str(outcome.trivial_reason),
    )
    if args.all:
        try:
            polytope = contact_polytope(p, tol)
        except InfeasibleProblemError:
            # upsilon = 0: the contact polytope is the single slack point.
            result.interior = result.y
        else:
            generators = [gen for gen in outcome.generators if gen.w is not None]
            result.generators = _rows(polytope.extreme_points)
            result.interior = relative_interior_point(polytope).tolist()
            if generators:
                solutions = solutions_from_generators(p, generators, tol)
            else:
                # Trivially feasible: the generators were never calibrated.
                solutions = [
                    solve_consistent(p.G, p.v - w, tol) for w in polytope.extreme_points
                ]
            result.solutions = _rows(solutions)
    result.stats = stats | {"wall_ms": _elapsed_ms(start)}
    _emit(result, args.output)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    """Runs the enumerative or evolutive LP algorithm on a problem file."""
    problem = load_problem(args.input)
    tol = problem.tolerance(args.tol)
    p = problem.lp_problem()
    outcome = run_solver(args.mode, p, tol, all_solutions=args.all_solutions)
    stats = {
        "rays_enumerated": outcome.rays_enumerated,
        "rays_walked": outcome.rays_walked,
        "steps": len(outcome.trace.steps) if outcome.trace else 0,
        "retries": outcome.retries,
        "rank_check_failures": outcome.rank_check_failures,
        "wall_ms": outcome.wall_ms,
    }

    match outcome.status:
        case LpStatus.INFEASIBLE:
            _emit(ResultFile(status="infeasible", stats=stats), args.output)
            return EXIT_INFEASIBLE
        case LpStatus.UNSUPPORTED:
            result = ResultFile(
                status="unsupported",
                reason=outcome.reason,
                witness=None if outcome.witness is None else outcome.witness.y.tolist(),
                stats=stats,
            )
            _emit(result, args.output)
            return EXIT_UNSUPPORTED

    result = ResultFile(
        status="optimal",
        h_o=outcome.h_o,
        x=outcome.x_o.tolist(),
        y=outcome.y_o.tolist(),
        stats=stats,
    )
    if outcome.optimal_extremes is not None:
        result.solutions = _rows(outcome.optimal_extremes)
    if args.trace and outcome.trace is not None:
        result.trace = [
            {"h": step.h, "last_component": step.generator_last_component}
            for step in outcome.trace.steps
        ]
    _emit(result, args.output)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    """Generates one instance, or a suite of them with --count."""
    if args.count < 1:
        raise MalformedProblemError("count", "must be at least 1")
    if args.count == 1:
        _emit(generate_problem(args.seed, args.n, args.m, args.kind), args.output)
        return EXIT_OK
    if args.output is None:
        raise MalformedProblemError("output", "a directory is required with --count")
    for offset in range(args.count):
        problem = generate_problem(args.seed + offset, args.n, args.m, args.kind)
        _emit(problem, args.output / f"{problem.name}.json")
    logger.info(f"Wrote {args.count} instances to {args.output}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    """Reports the brute-force verdict for a problem file."""
    start = time.perf_counter()
    problem = load_problem(args.input)
    tol = problem.tolerance(args.tol)
    if problem.f is None:
        verdict = oracle_solve(problem.feasibility_problem(), tol)
        vertices = verdict.vertices
    else:
        verdict = oracle_solve(problem.lp_problem(), tol)
        vertices = verdict.argmax_vertices
    stats = {"vertices": len(verdict.vertices), "wall_ms": _elapsed_ms(start)}
    if not verdict.feasible:
        _emit(ResultFile(status="infeasible", stats=stats), args.output)
        return EXIT_INFEASIBLE
    result = ResultFile(
        status="feasible" if verdict.optimum is None else "optimal",
        h_o=verdict.optimum,
        x=vertices[0].tolist(),
        generators=_rows(vertices),
        stats=stats,
    )
    _emit(result, args.output)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Benchmarks a suite directory of problem files."""
    if not args.suite.is_dir():
        raise MalformedProblemError("suite", f"{args.suite} is not a directory")
    report = run_benchmark(load_suite(args.suite), args.workers, args.tol)
    summary = summarise(report)
    if args.csv is not None:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        report.write_csv(args.csv)
    if args.db is not None:
        save_results(report, str(args.suite), create_session(args.db))

    document = json.dumps({"summary": summary, "rows": report.to_dicts()}, indent=2)
    if args.output is None:
        print(report)
        print(json.dumps(summary, indent=2))
    else:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(document + "\n")
        print(report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Builds the argument parser with global flags and subcommands."""
    parser = _Parser(prog="conical-lp", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--tol", type=float, help="override zero_tol")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--output", type=Path, help="write the result here")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    feas = subparsers.add_parser("feas", help="decide feasibility of G x <= v")
    feas.add_argument("input", type=Path)
    feas.add_argument(
        "--all", action="store_true", help="return every calibrated generator"
    )
    feas.set_defaults(handler=cmd_feas)

    solve = subparsers.add_parser("solve", help="maximise f x subject to G x <= v")
    solve.add_argument("input", type=Path)
    solve.add_argument("--mode", choices=SOLVER_MODES, default="enum")
    solve.add_argument("--all-solutions", action="store_true")
    solve.add_argument("--trace", action="store_true")
    solve.set_defaults(handler=cmd_solve)

    gen = subparsers.add_parser("gen", help="generate strictly tangent instances")
    gen.add_argument("--n", type=int, required=True, help="rows of G")
    gen.add_argument("--m", type=int, required=True, help="columns of G")
    gen.add_argument("--kind", choices=INSTANCE_KINDS, default="feasible")
    gen.add_argument("--count", type=int, default=1)
    gen.set_defaults(handler=cmd_gen)

    oracle = subparsers.add_parser("oracle", help="brute-force verdict")
    oracle.add_argument("input", type=Path)
    oracle.set_defaults(handler=cmd_oracle)

    bench = subparsers.add_parser("bench", help="benchmark a suite directory")
    bench.add_argument("suite", type=Path)
    bench.add_argument("--workers", type=int, default=DEFAULT_BENCH_WORKERS)
    bench.add_argument("--csv", type=Path, help="export the report as CSV")
    bench.add_argument("--db", help="store rows in this SQLAlchemy database URL")
    bench.set_defaults(handler=cmd_bench)
    return parser


def _fail(args: argparse.Namespace, e: ConicalSolverError, code: int) -> int:
    logger.error(str(e))
    sys.stderr.write(f"conical-lp: {type(e).__name__}: {e}\n")
    if args.command != "gen":
        _emit(ResultFile(status="error", message=str(e)), args.output)
    return code


def main(argv: list[str] | None = None) -> int:
    """
    Parses arguments, runs the subcommand and maps failures to exit codes.

    Args:
        argv: The arguments (defaults to sys.argv[1:]).

    Returns:
        The exit code.
    """
    args = build_parser().parse_args(argv)
    levels = [logging.WARNING, logging.INFO, logging.DEBUG]
    logging.basicConfig(level=levels[min(args.verbose, 2)])
    handler: Callable[[argparse.Namespace], int] = args.handler

    try:
        return handler(args)
    except (MalformedProblemError, DimensionTooLargeError) as e:
        return _fail(args, e, EXIT_MALFORMED)
    except NotStrictlyTangentError as e:
        witness = None if e.witness is None else e.witness.y.tolist()
        result = ResultFile(status="unsupported", reason=str(e), witness=witness)
        _emit(result, args.output)
        return EXIT_UNSUPPORTED
    except FileNotFoundError as e:
        sys.stderr.write(f"conical-lp: {e}\n")
        return EXIT_MALFORMED
    except ConicalSolverError as e:
        return _fail(args, e, EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
