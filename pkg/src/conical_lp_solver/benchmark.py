"""
Contains the benchmark harness: runs both conical solvers and the oracle on a
suite of problem files and reports agreement, ray counts and timings.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl
from sqlalchemy.orm import Session

from conical_lp_solver.data import ProblemFile, load_problem
from conical_lp_solver.exceptions import ConicalSolverError, DimensionTooLargeError
from conical_lp_solver.feasibility import solve_feasibility
from conical_lp_solver.linalg import ToleranceConfig
from conical_lp_solver.lp_solver import (
    LpOutcome,
    LpProblem,
    solve_enumerative,
    solve_evolutive,
)
from conical_lp_solver.models import BenchResultModel
from conical_lp_solver.oracle import oracle_solve
from conical_lp_solver.utils import DEFAULT_BENCH_WORKERS, SOLVER_MODES, logger

# Relative agreement required between optima.
AGREEMENT_TOL = 1e-6

REPORT_SCHEMA = {
    "name": pl.String,
    "status_enum": pl.String,
    "status_evo": pl.String,
    "h_enum": pl.Float64,
    "h_evo": pl.Float64,
    "h_oracle": pl.Float64,
    "agree": pl.Boolean,
    "rays_enum": pl.Int64,
    "rays_evo": pl.Int64,
    "rays_walked_evo": pl.Int64,
    "steps": pl.Int64,
    "wall_ms_enum": pl.Float64,
    "wall_ms_evo": pl.Float64,
    "error": pl.String,
}


def run_solver(
    mode: str, p: LpProblem, tol: ToleranceConfig, all_solutions: bool = False
) -> LpOutcome:
    """
    Runs the LP solver selected by mode.

    Args:
        mode: One of SOLVER_MODES.
        p: The LP problem.
        tol: The tolerance configuration.
        all_solutions: Whether to describe the optimal face as well.

    Returns:
        The LP outcome.
    """
    if mode not in SOLVER_MODES:
        raise ValueError("Invalid solver mode")

    match mode:
        case "enum":
            return solve_enumerative(p, tol, all_solutions)
        case "evo":
            return solve_evolutive(p, tol, all_solutions)
        case _:
            raise ValueError(f"Unexpected solver mode: {mode}")


def _close(a: float | None, b: float | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= AGREEMENT_TOL * (1.0 + abs(b))


def _empty_row(name: str) -> dict[str, Any]:
    return {
        "name": name,
        "status_enum": "error",
        "status_evo": "error",
        "h_enum": None,
        "h_evo": None,
        "h_oracle": None,
        "agree": None,
        "rays_enum": 0,
        "rays_evo": 0,
        "rays_walked_evo": 0,
        "steps": 0,
        "wall_ms_enum": 0.0,
        "wall_ms_evo": 0.0,
        "error": None,
    }


def _lp_row(row: dict[str, Any], p: LpProblem, tol: ToleranceConfig) -> None:
    enum = run_solver("enum", p, tol)
    evo = run_solver("evo", p, tol)
    row.update(
        status_enum=str(enum.status),
        status_evo=str(evo.status),
        h_enum=enum.h_o,
        h_evo=evo.h_o,
        rays_enum=enum.rays_enumerated,
        rays_evo=evo.rays_enumerated,
        rays_walked_evo=evo.rays_walked,
        steps=len(evo.trace.steps) if evo.trace else 0,
        wall_ms_enum=enum.wall_ms,
        wall_ms_evo=evo.wall_ms,
    )
    agree = enum.status == evo.status and _close(evo.h_o, enum.h_o)
    if enum.status == "unsupported":
        row["agree"] = agree
        return
    try:
        verdict = oracle_solve(p, tol)
    except DimensionTooLargeError:
        row["agree"] = agree
        return
    row["h_oracle"] = verdict.optimum
    row["agree"] = agree and _close(enum.h_o, verdict.optimum)


def _feasibility_row(
    row: dict[str, Any], problem: ProblemFile, tol: ToleranceConfig
) -> None:
    p = problem.feasibility_problem()
    outcome = solve_feasibility(p, tol)
    status = "feasible" if outcome.is_feasible else "infeasible"
    row.update(status_enum=status, status_evo=status)
    rays = outcome.rays_enumerated
    row.update(rays_enum=rays, rays_evo=rays, rays_walked_evo=rays)
    try:
        verdict = oracle_solve(p, tol)
    except DimensionTooLargeError:
        return
    row["agree"] = verdict.feasible == outcome.is_feasible


def run_instance(problem: ProblemFile, zero_tol: float | None = None) -> dict:
    """
    Benchmarks one instance.

    LP instances run both solvers and the oracle; instances without an
    objective run the feasibility solver and the oracle. Failures are
    recorded in the row rather than raised.

    Args:
        problem: The problem file.
        zero_tol: A command-line override of zero_tol.

    Returns:
        One report row.
    """
    row = _empty_row(problem.name)
    try:
        tol = problem.tolerance(zero_tol)
        if problem.f is None:
            _feasibility_row(row, problem, tol)
        else:
            _lp_row(row, problem.lp_problem(), tol)
    except (ConicalSolverError, np.linalg.LinAlgError) as e:
        logger.warning(f"Instance {problem.name} failed: {e}")
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def load_suite(suite: Path) -> list[ProblemFile]:
    """Loads every *.json problem file of a directory, sorted by file name."""
    return [load_problem(path) for path in sorted(Path(suite).glob("*.json"))]


def run_benchmark(
    problems: list[ProblemFile],
    workers: int = DEFAULT_BENCH_WORKERS,
    zero_tol: float | None = None,
) -> pl.DataFrame:
    """
    Benchmarks a list of instances.

    Args:
        problems: The instances.
        workers: Threads used to solve instances concurrently.
        zero_tol: A command-line override of zero_tol.

    Returns:
        The report, one row per instance in input order, with the ray
        savings of the evolutive solver over the rays its cursors walked.
    """
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        rows = list(executor.map(lambda p: run_instance(p, zero_tol), problems))
    report = pl.DataFrame(rows, schema=REPORT_SCHEMA)
    logger.info(f"Benchmarked {report.height} instances")
    return report.with_columns(
        (pl.col("rays_enum") - pl.col("rays_walked_evo")).alias("ray_savings")
    )


def summarise(report: pl.DataFrame) -> dict[str, int | float]:
    """
    Aggregates a benchmark report.

    Args:
        report: The report from run_benchmark.

    Returns:
        Instance, agreement, error and efficiency counts plus mean timings.
    """
    if report.is_empty():
        return {"instances": 0, "agree": 0, "errors": 0, "evo_le_enum": 0}
    return {
        "instances": report.height,
        "agree": int(report["agree"].sum() or 0),
        "errors": int(report["error"].is_not_null().sum()),
        "evo_le_enum": int((report["rays_evo"] <= report["rays_enum"]).sum()),
        "mean_wall_ms_enum": float(report["wall_ms_enum"].mean() or 0.0),
        "mean_wall_ms_evo": float(report["wall_ms_evo"].mean() or 0.0),
    }


def save_results(report: pl.DataFrame, suite: str, session: Session) -> int:
    """
    Stores the report rows in the database.

    Args:
        report: The report from run_benchmark.
        suite: The suite label stored with every row.
        session: An open SQLAlchemy session.

    Returns:
        The number of rows stored.
    """
    columns = set(REPORT_SCHEMA)
    try:
        for row in report.iter_rows(named=True):
            values = {key: value for key, value in row.items() if key in columns}
            session.add(BenchResultModel(suite=suite, **values))
        session.commit()
    except Exception as e:
        session.rollback()
        raise ValueError(f"Failed to save benchmark results: {str(e)}")
    return report.height
