"""
Contains the dense linear algebra the conical methods are built on:
orthonormal range bases, orthogonal projectors, rank decisions and the
solution of consistent systems, all under one explicit tolerance policy.

Ranks and projectors come from the singular value decomposition. Every zero
test is relative to the scale of the inputs that produced the quantity.
"""

from dataclasses import dataclass, fields, replace
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from conical_lp_solver.exceptions import InconsistentSystemError, MalformedProblemError
from conical_lp_solver.utils import NEAR_THRESHOLD_FACTOR, logger

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]


@dataclass(frozen=True)
class ToleranceConfig:
    """
    Tolerances shared by every numerical decision in the solver.

    Attributes:
        zero_tol: Relative threshold below which a quantity counts as zero.
        rank_tol: Singular-value cutoff factor for rank decisions.
        ratio_tol: Agreement threshold for calibration ratios.
    """

    zero_tol: float = 1e-9
    rank_tol: float = 1e-10
    ratio_tol: float = 1e-7

    def __post_init__(self) -> None:
        for item in fields(self):
            value = getattr(self, item.name)
            if not np.isfinite(value) or value <= 0:
                raise MalformedProblemError(
                    item.name, f"tolerance must be strictly positive, got {value}"
                )

    def with_overrides(self, **overrides: Any) -> "ToleranceConfig":
        """
        Returns a copy with some tolerances replaced.

        Args:
            overrides: Tolerance names mapped to new values. None values are
                       ignored.

        Returns:
            The updated configuration.
        """
        known = {item.name for item in fields(self)}
        updates = {}
        for name, value in overrides.items():
            if name not in known:
                raise MalformedProblemError(name, "unknown tolerance")
            if value is None:
                continue
            try:
                updates[name] = float(value)
            except (TypeError, ValueError) as e:
                raise MalformedProblemError(name, f"not a number ({e})") from e
        return replace(self, **updates)

    def threshold(self, *inputs: ArrayLike | float) -> float:
        """
        Computes the zero threshold for a quantity derived from the inputs.

        Args:
            inputs: The arrays or scalars that produced the quantity.

        Returns:
            zero_tol * (1 + scale), where scale is the largest absolute entry
            across the inputs.
        """
        return self.zero_tol * (1.0 + max_abs(*inputs))


def max_abs(*inputs: ArrayLike | float) -> float:
    """Returns the largest absolute entry across the inputs (0 if all empty)."""
    scale = 0.0
    for item in inputs:
        array = np.asarray(item, dtype=float)
        if array.size:
            scale = max(scale, float(np.max(np.abs(array))))
    return scale


def as_matrix(values: ArrayLike, field: str = "G") -> Matrix:
    """
    Converts values into a finite two-dimensional float array.

    Args:
        values: Row-major nested sequence or array.
        field: The field name reported when validation fails.

    Returns:
        The validated matrix.
    """
    try:
        matrix = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise MalformedProblemError(field, f"not a numeric matrix ({e})") from e
    if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
        raise MalformedProblemError(
            field, f"expected a non-empty 2-D array, got shape {matrix.shape}"
        )
    if not np.all(np.isfinite(matrix)):
        raise MalformedProblemError(field, "entries must be finite")
    return matrix


def as_vector(values: ArrayLike, field: str = "v") -> Vector:
    """
    Converts values into a finite one-dimensional float array.

    Args:
        values: A sequence or array of reals.
        field: The field name reported when validation fails.

    Returns:
        The validated vector.
    """
    try:
        vector = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise MalformedProblemError(field, f"not a numeric vector ({e})") from e
    if vector.ndim != 1 or vector.shape[0] < 1:
        raise MalformedProblemError(
            field, f"expected a non-empty 1-D array, got shape {vector.shape}"
        )
    if not np.all(np.isfinite(vector)):
        raise MalformedProblemError(field, "entries must be finite")
    return vector


def _rank_cutoff(
    singular_values: Vector, shape: tuple[int, int], tol: ToleranceConfig
) -> float:
    if singular_values.size == 0:
        return 0.0
    return tol.rank_tol * float(singular_values[0]) * max(shape)


def _flag_near_threshold(
    singular_values: Vector, cutoff: float, shape: tuple[int, int]
) -> None:
    if cutoff <= 0:
        return
    near = singular_values[
        (singular_values > cutoff / NEAR_THRESHOLD_FACTOR)
        & (singular_values < cutoff * NEAR_THRESHOLD_FACTOR)
    ]
    if near.size:
        logger.warning(
            f"Near-threshold rank decision for a {shape[0]}x{shape[1]} matrix: "
            f"singular values {near.tolist()} against cutoff {cutoff:.3e}"
        )


def orthonormal_range_basis(M: Matrix, tol: ToleranceConfig) -> Matrix:
    """
    Computes an orthonormal basis of the range (column space) of M.

    The rank is decided by the singular values: sigma_i is kept when it
    exceeds both rank_tol * sigma_max * max(rows, cols) and the zero
    threshold of M. The second cutoff discards rounding noise left in
    matrices that should vanish, such as I - P_V - P_F when the extended
    subspace is the whole space.

    Args:
        M: The matrix.
        tol: The tolerance configuration.

    Returns:
        A rows x rank matrix with orthonormal columns. A numerically zero M
        gives a basis with no columns.
    """
    rows = M.shape[0]
    if M.size == 0 or not np.any(M):
        return np.zeros((rows, 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    cutoff = max(_rank_cutoff(s, M.shape, tol), tol.threshold(M))
    _flag_near_threshold(s, cutoff, M.shape)
    rank = int(np.sum(s > cutoff))
    return U[:, :rank]


def matrix_rank(
    M: Matrix, tol: ToleranceConfig, floor: float | None = None
) -> int:
    """
    Decides the numerical rank of M with the same cutoff as
    orthonormal_range_basis.

    Args:
        M: The matrix (may have zero rows or columns).
        tol: The tolerance configuration.
        floor: An absolute cutoff below which singular values never count.
               Defaults to the zero threshold of M.

    Returns:
        The numerical rank.
    """
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if floor is None:
        floor = tol.threshold(M)
    cutoff = max(_rank_cutoff(s, M.shape, tol), floor)
    return int(np.sum(s > cutoff))


def projector_onto_range(M: Matrix, tol: ToleranceConfig) -> Matrix:
    """
    Builds the orthogonal projector onto the range of M as B @ B.T, with B
    an orthonormal range basis.

    Args:
        M: The matrix.
        tol: The tolerance configuration.

    Returns:
        The symmetric idempotent rows x rows projector.
    """
    basis = orthonormal_range_basis(M, tol)
    return basis @ basis.T


def projector_onto_span(
    u: Vector, tol: ToleranceConfig, *inputs: ArrayLike | float
) -> Matrix:
    """
    Builds the orthogonal projector onto the line spanned by u.

    Args:
        u: The spanning vector.
        tol: The tolerance configuration.
        inputs: The arrays u was derived from, which set the zero threshold.
                Without them u is its own scale.

    Returns:
        u u^T / |u|^2, or the zero matrix when u is numerically zero (the
        caller interprets that case).
    """
    n = u.shape[0]
    if max_abs(u) <= tol.threshold(*(inputs or (u,))):
        return np.zeros((n, n))
    return np.outer(u, u) / float(u @ u)


def solve_consistent(G: Matrix, b: Vector, tol: ToleranceConfig) -> Vector:
    """
    Solves G x = b for a right-hand side known to lie in the range of G.

    Args:
        G: The coefficient matrix.
        b: The right-hand side.
        tol: The tolerance configuration.

    Returns:
        The minimum-norm solution.

    Raises:
        InconsistentSystemError: If the residual exceeds the zero threshold,
            which means an upstream invariant was broken.
    """
    rcond = tol.rank_tol * max(G.shape)
    x, *_ = np.linalg.lstsq(G, b, rcond=rcond)
    residual = float(np.linalg.norm(G @ x - b))
    limit = tol.threshold(G, b) * (1.0 + float(np.linalg.norm(b)))
    if residual > limit:
        raise InconsistentSystemError(
            f"System expected to be consistent has residual {residual:.3e} "
            f"(limit {limit:.3e})"
        )
    return x


def is_orthogonal_projector(Q: Matrix, tol: ToleranceConfig) -> bool:
    """Checks symmetry and idempotence of Q within the zero threshold."""
    limit = tol.threshold(Q)
    return bool(
        np.max(np.abs(Q @ Q - Q), initial=0.0) <= limit
        and np.max(np.abs(Q - Q.T), initial=0.0) <= limit
    )


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    """
    The projectors of one bound decomposition.

    Attributes:
        P_F: Projector onto the range F of the coefficient matrix.
        P_V: Projector onto the line spanned by upsilon.
        P_Fperp: Projector onto the orthogonal complement of F.
        T: I - P_V - P_F, the projector whose null space is the extended
           subspace span(upsilon) + F.
    """

    P_F: Matrix
    P_V: Matrix
    P_Fperp: Matrix
    T: Matrix


def build_projector_set(
    P_F: Matrix, upsilon: Vector, tol: ToleranceConfig, *inputs: ArrayLike | float
) -> ProjectorSet:
    """
    Assembles the projector set from the range projector and upsilon.

    Only P_V depends on the bound vector, so callers that vary the bound keep
    P_F and rebuild through this function.

    Args:
        P_F: Projector onto the range of the coefficient matrix.
        upsilon: The component of the bound orthogonal to that range.
        tol: The tolerance configuration.
        inputs: The problem data upsilon was derived from.

    Returns:
        The projector set.
    """
    identity = np.eye(P_F.shape[0])
    P_V = projector_onto_span(upsilon, tol, *inputs)
    return ProjectorSet(
        P_F=P_F, P_V=P_V, P_Fperp=identity - P_F, T=identity - P_V - P_F
    )
