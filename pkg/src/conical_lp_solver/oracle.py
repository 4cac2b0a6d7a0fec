"""
Brute-force ground truth for small problems.

Vertices of {x : G x <= v} are found by solving every square subsystem of
tight rows, and LP optima by evaluating the objective on them. None of this
shares code with the conical solvers beyond the linear algebra primitives.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from conical_lp_solver.exceptions import DimensionTooLargeError
from conical_lp_solver.feasibility import FeasibilityProblem
from conical_lp_solver.linalg import (
    Matrix,
    ToleranceConfig,
    Vector,
    matrix_rank,
    max_abs,
    orthonormal_range_basis,
)
from conical_lp_solver.lp_solver import LpProblem
from conical_lp_solver.utils import MAX_ORACLE_COLS, MAX_ORACLE_ROWS, logger

# Vertices closer than this (max norm) are the same vertex.
DEDUPLICATION_TOL = 1e-8
# Relative tolerance for a vertex to count as attaining the optimum.
ARGMAX_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OracleVerdict:
    """
    What brute force says about a problem.

    Attributes:
        feasible: Whether G x <= v has a solution.
        optimum: The maximum of f x over the vertices, for LP problems.
        argmax_vertices: The vertices attaining the optimum.
        vertices: Every vertex found.
    """

    feasible: bool
    optimum: float | None = None
    argmax_vertices: list[Vector] = field(default_factory=list)
    vertices: list[Vector] = field(default_factory=list)


def _check_caps(G: Matrix) -> None:
    rows, cols = G.shape
    if rows > MAX_ORACLE_ROWS or cols > MAX_ORACLE_COLS:
        raise DimensionTooLargeError(
            f"Vertex enumeration is capped at {MAX_ORACLE_ROWS} rows and "
            f"{MAX_ORACLE_COLS} columns, got {rows}x{cols}"
        )


def _deduplicate(points: list[Vector]) -> list[Vector]:
    unique: list[Vector] = []
    for point in points:
        if all(np.max(np.abs(point - other)) > DEDUPLICATION_TOL for other in unique):
            unique.append(point)
    return unique


def vertex_enumerate(G: Matrix, v: Vector, tol: ToleranceConfig) -> list[Vector]:
    """
    Enumerates the basic feasible points of {x : G x <= v}.

    When G has rank r below its column count, x is restricted to the row
    space of G: with B an orthonormal basis of R(G^T), the polytope
    {u : G B u <= v} has full column rank and its vertices map back through
    x = B u.

    Args:
        G: The n x m coefficient matrix, n <= MAX_ORACLE_ROWS and
           m <= MAX_ORACLE_COLS.
        v: The bound vector.
        tol: The tolerance configuration.

    Returns:
        The vertices in the order their row subsets are generated, without
        duplicates.

    Raises:
        DimensionTooLargeError: Above the caps.
    """
    _check_caps(G)
    basis = orthonormal_range_basis(G.T, tol)
    rank = basis.shape[1]
    if rank == 0:
        feasible = bool(np.all(v >= -tol.threshold(v)))
        return [np.zeros(G.shape[1])] if feasible else []

    A = G @ basis
    limit = tol.threshold(A, v)
    points = []
    for rows in itertools.combinations(range(A.shape[0]), rank):
        A_S = A[list(rows)]
        if matrix_rank(A_S, tol) < rank:
            continue
        u = np.linalg.solve(A_S, v[list(rows)])
        if np.max(A @ u - v) <= limit * (1.0 + max_abs(u)):
            points.append(basis @ u)
    vertices = _deduplicate(points)
    logger.debug(f"Vertex enumeration on {G.shape}: {len(vertices)} vertices")
    return vertices


def oracle_solve(
    p: LpProblem | FeasibilityProblem, tol: ToleranceConfig
) -> OracleVerdict:
    """
    Decides feasibility, and for LP problems the optimum, by brute force.

    The feasible set of a strictly tangent problem is bounded, so it is
    non-empty iff it has a vertex and the LP optimum is attained at one.

    Args:
        p: An LP problem, or a feasibility problem (no optimum reported).
        tol: The tolerance configuration.

    Returns:
        The oracle verdict.

    Raises:
        DimensionTooLargeError: Above the vertex enumeration caps.
    """
    vertices = vertex_enumerate(p.G, p.v, tol)
    if not vertices:
        return OracleVerdict(feasible=False)
    if not isinstance(p, LpProblem):
        return OracleVerdict(feasible=True, vertices=vertices)

    values = np.array([float(p.f @ x) for x in vertices])
    optimum = float(np.max(values))
    attained = values >= optimum - ARGMAX_TOL * (1.0 + abs(optimum))
    return OracleVerdict(
        feasible=True,
        optimum=optimum,
        argmax_vertices=[x for x, hit in zip(vertices, attained) if hit],
        vertices=vertices,
    )


def hull_member(point: Vector, points: list[Vector], tol: float = 1e-6) -> bool:
    """
    Checks whether point is a convex combination of points.

    Solves min sum(s+ + s-) subject to sum_i lambda_i p_i + s+ - s- = point,
    sum_i lambda_i = 1 and lambda, s+, s- >= 0.

    Args:
        point: The point to test.
        points: A non-empty list of points of the same dimension.
        tol: The largest L1 residual accepted, relative to the point scale.

    Returns:
        True when the minimal residual is within tol.
    """
    hull = np.vstack(points).T
    dim, count = hull.shape
    identity = np.eye(dim)
    A_eq = np.block(
        [
            [hull, identity, -identity],
            [np.ones((1, count)), np.zeros((1, 2 * dim))],
        ]
    )
    b_eq = np.append(point, 1.0)
    c = np.concatenate([np.zeros(count), np.ones(2 * dim)])
    result = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not result.success:
        logger.warning(f"Hull membership LP failed: {result.message}")
        return False
    return bool(result.fun <= tol * (1.0 + max_abs(point)))
