"""
Generates seeded random instances whose coefficient matrix is strictly
tangent to the non-negative orthant.

Every column of G is projected onto the orthogonal complement of a strictly
positive vector, so R(G) lies in a hyperplane meeting the orthant only at the
origin. LP objectives are drawn as f = G^T mu with mu >= 0, which keeps the
augmented matrix [G; -f] strictly tangent as well.
"""

import numpy as np

from conical_lp_solver.data import ProblemFile
from conical_lp_solver.exceptions import MalformedProblemError
from conical_lp_solver.linalg import Matrix, Vector
from conical_lp_solver.utils import INSTANCE_KINDS


def _validate(n: int, m: int, kind: str) -> None:
    if kind not in INSTANCE_KINDS:
        raise MalformedProblemError("kind", f"expected one of {INSTANCE_KINDS}")
    if n < 2:
        raise MalformedProblemError("n", f"need at least 2 rows, got {n}")
    if not 1 <= m < n:
        raise MalformedProblemError("m", f"need 1 <= m < n, got m = {m}, n = {n}")
    if kind == "face" and m < 2:
        raise MalformedProblemError("m", "face instances need at least 2 columns")


def strictly_tangent_matrix(rng: np.random.Generator, n: int, m: int) -> Matrix:
    """
    Draws an n x m matrix whose range meets the orthant only at 0.

    Args:
        rng: The random generator.
        n: Rows.
        m: Columns.

    Returns:
        Gaussian columns projected onto the complement of a positive normal.
    """
    normal = rng.uniform(0.5, 1.5, size=n)
    normal /= np.linalg.norm(normal)
    columns = rng.standard_normal((n, m))
    return columns - np.outer(normal, normal @ columns)


def _positive_objective(rng: np.random.Generator, G: Matrix) -> Vector:
    # f = G^T n' / c for a strictly positive (n+1)-vector (n', c).
    while True:
        weights = rng.uniform(0.5, 1.5, size=G.shape[0] + 1)
        f = G.T @ weights[:-1] / weights[-1]
        if np.max(np.abs(f)) > 1e-6:
            return f


def generate_problem(seed: int, n: int, m: int, kind: str) -> ProblemFile:
    """
    Generates one instance, deterministically per seed.

    Kinds:
        feasible: v = G x0 + s with s >= 0, so x0 is feasible.
        unrestricted: v standard normal, feasibility unknown.
        lp: a feasible instance with an objective.
        face: an LP whose optimal face is an edge. m rows are tight at x0 and
              f is a positive combination of m - 1 of them.

    Args:
        seed: The random seed.
        n: Rows of G (constraints).
        m: Columns of G (variables).
        kind: One of INSTANCE_KINDS.

    Returns:
        The problem file.

    Raises:
        MalformedProblemError: For invalid dimensions or kind.
    """
    _validate(n, m, kind)
    rng = np.random.default_rng(seed)
    G = strictly_tangent_matrix(rng, n, m)
    x0 = rng.standard_normal(m)
    slack = rng.uniform(0.0, 1.0, size=n)
    f = None

    match kind:
        case "unrestricted":
            v = rng.standard_normal(n)
        case "feasible":
            v = G @ x0 + slack
        case "lp":
            v = G @ x0 + slack
            f = _positive_objective(rng, G)
        case "face":
            tight = rng.choice(n, size=m, replace=False)
            slack[tight] = 0.0
            v = G @ x0 + slack
            weights = rng.uniform(0.5, 1.5, size=m - 1)
            f = G[tight[:-1]].T @ weights

    return ProblemFile(
        name=f"{kind}-n{n}-m{m}-s{seed}",
        G=G.tolist(),
        v=v.tolist(),
        f=None if f is None else f.tolist(),
    )
