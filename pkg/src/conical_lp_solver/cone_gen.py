"""
Enumerates the extreme rays (generators) of the pointed polyhedral cone
N(T) ∩ P, where T is an orthogonal projector and P the non-negative orthant.

The construction is a double description: it starts from the unit rays of the
orthant and intersects the cone with one hyperplane {y : r.y = 0} at a time,
for the rows r of an orthonormal basis of the range of T. Rays on either side
of a hyperplane are combined when they are adjacent, which is decided by an
algebraic rank test.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from conical_lp_solver.exceptions import (
    DimensionTooLargeError,
    NotPointedError,
    NumericalFailureError,
)
from conical_lp_solver.linalg import (
    Matrix,
    ToleranceConfig,
    Vector,
    is_orthogonal_projector,
    matrix_rank,
    orthonormal_range_basis,
)
from conical_lp_solver.utils import MAX_RAY_ORACLE_DIM, logger


@dataclass(frozen=True, eq=False)
class Ray:
    """
    A normalised extreme ray of N(T) ∩ P.

    Attributes:
        y: The generator, non-negative with largest component equal to 1.
        support: Indices of the strictly positive components, ascending.
    """

    y: Vector
    support: tuple[int, ...]

    @property
    def dim(self) -> int:
        return int(self.y.shape[0])


@dataclass(frozen=True, eq=False)
class RayCursor:
    """
    Progress through the deterministic ray order of one projector.

    A fresh cursor has no rays. Once the construction has run for a projector
    the cursor keeps the ordered rays, a fingerprint of the projector and the
    index of the next ray to inspect. A cursor presented with a different
    projector restarts the construction on it.
    """

    fingerprint: bytes | None = None
    rays: tuple[Ray, ...] = ()
    index: int = 0

    @property
    def completed(self) -> bool:
        return self.fingerprint is not None


@dataclass
class _Candidate:
    y: Vector
    support: tuple[int, ...] = field(default=())


def _zero_threshold(tol: ToleranceConfig) -> float:
    # Rays are normalised to a unit maximum and hyperplanes to unit length.
    return tol.zero_tol * 2.0


def _normalise(y: Vector, tol: ToleranceConfig) -> _Candidate:
    y = y / float(np.max(y))
    y[y <= _zero_threshold(tol)] = 0.0
    support = tuple(int(i) for i in np.flatnonzero(y))
    return _Candidate(y=y, support=support)


def _null_dimension(
    constraints: Matrix, support: tuple[int, ...], tol: ToleranceConfig
) -> int:
    columns = constraints[:, list(support)]
    return len(support) - matrix_rank(columns, tol, floor=tol.zero_tol)


def _intersect_hyperplane(
    candidates: list[_Candidate],
    processed: Matrix,
    hyperplane: Vector,
    tol: ToleranceConfig,
) -> list[_Candidate]:
    """
    Intersects the cone generated by candidates with {y : hyperplane.y = 0}.

    Args:
        candidates: The extreme rays of the cone cut out by processed.
        processed: The hyperplanes already applied, one per row.
        hyperplane: The hyperplane normal to apply.
        tol: The tolerance configuration.

    Returns:
        The extreme rays of the intersection, ordered by support.
    """
    threshold = _zero_threshold(tol)
    values = [float(hyperplane @ candidate.y) for candidate in candidates]
    kept = [c for c, value in zip(candidates, values) if abs(value) <= threshold]
    positive = [(c, val) for c, val in zip(candidates, values) if val > threshold]
    negative = [(c, val) for c, val in zip(candidates, values) if val < -threshold]

    # Two rays can only be adjacent if their joint support leaves a
    # two-dimensional null space under the processed constraints.
    max_support = processed.shape[0] + 2
    combined: dict[tuple[int, ...], _Candidate] = {c.support: c for c in kept}
    for (a, value_a), (b, value_b) in itertools.product(positive, negative):
        support = tuple(sorted(set(a.support) | set(b.support)))
        if len(support) > max_support:
            continue
        if _null_dimension(processed, support, tol) != 2:
            continue
        candidate = _normalise(value_a * b.y - value_b * a.y, tol)
        combined.setdefault(candidate.support, candidate)

    logger.debug(
        f"Hyperplane {processed.shape[0] + 1}: {len(kept)} kept, "
        f"{len(positive)}x{len(negative)} pairs, {len(combined)} rays"
    )
    return [combined[key] for key in sorted(combined)]


def _validate_rays(
    rays: list[_Candidate], T: Matrix, constraints: Matrix, tol: ToleranceConfig
) -> list[Ray]:
    limit = tol.threshold(T)
    result = []
    for candidate in rays:
        residual = float(np.max(np.abs(T @ candidate.y)))
        if residual > limit * (1.0 + float(np.max(candidate.y))):
            raise NumericalFailureError(
                f"Ray with support {candidate.support} leaves N(T) "
                f"(residual {residual:.3e})"
            )
        if _null_dimension(constraints, candidate.support, tol) != 1:
            raise NumericalFailureError(
                f"Ray with support {candidate.support} is not extreme"
            )
        result.append(Ray(y=candidate.y, support=candidate.support))
    _check_pointed(result, tol)
    return result


def _check_pointed(rays: list[Ray], tol: ToleranceConfig) -> None:
    limit = 10 * _zero_threshold(tol)
    for a, b in itertools.combinations(rays, 2):
        if np.max(np.abs(a.y + b.y)) <= limit:
            raise NotPointedError(
                f"Rays with supports {a.support} and {b.support} are opposite"
            )


def enumerate_rays(T: Matrix, tol: ToleranceConfig) -> list[Ray]:
    """
    Enumerates every extreme ray of N(T) ∩ P exactly once.

    Hyperplanes are the rows of an orthonormal basis of the range of T and
    are processed in basis order. After each hyperplane the rays are ordered
    lexicographically by support, which fixes the order of the result.

    Args:
        T: An orthogonal projector.
        tol: The tolerance configuration.

    Returns:
        The normalised extreme rays, empty iff N(T) ∩ P = {0}.

    Raises:
        NumericalFailureError: If T is not an orthogonal projector or a ray
            fails its invariants.
    """
    if not is_orthogonal_projector(T, tol):
        raise NumericalFailureError("Ray enumeration needs an orthogonal projector")
    n = T.shape[0]
    hyperplanes = orthonormal_range_basis(T, tol).T
    candidates = [_Candidate(y=np.eye(n)[i], support=(i,)) for i in range(n)]
    for k in range(hyperplanes.shape[0]):
        if not candidates:
            break
        candidates = _intersect_hyperplane(
            candidates, hyperplanes[:k], hyperplanes[k], tol
        )
    return _validate_rays(candidates, T, hyperplanes, tol)


def _fingerprint(T: Matrix, tol: ToleranceConfig) -> bytes:
    return np.ascontiguousarray(T).tobytes() + repr(tol).encode()


def open_cursor(T: Matrix, tol: ToleranceConfig) -> RayCursor:
    """Enumerates the rays of N(T) ∩ P once and returns a cursor at the first."""
    return RayCursor(
        fingerprint=_fingerprint(T, tol), rays=tuple(enumerate_rays(T, tol)), index=0
    )


def next_ray(
    T: Matrix, cursor: RayCursor, test_column: int, tol: ToleranceConfig
) -> tuple[Ray, RayCursor] | None:
    """
    Finds the next ray, in the deterministic order, whose test-column
    component is strictly positive.

    Args:
        T: An orthogonal projector.
        cursor: Where to resume. A fresh RayCursor() starts from the first
                ray; a cursor built for another projector restarts too.
        test_column: The 0-based coordinate required to be positive.
        tol: The tolerance configuration.

    Returns:
        The ray and the advanced cursor, or None when no further ray with a
        positive test component exists.
    """
    if not 0 <= test_column < T.shape[0]:
        raise IndexError(f"Test column {test_column} outside 0..{T.shape[0] - 1}")
    if cursor.fingerprint != _fingerprint(T, tol):
        cursor = open_cursor(T, tol)
    for index in range(cursor.index, len(cursor.rays)):
        ray = cursor.rays[index]
        if ray.y[test_column] > 0:
            return ray, RayCursor(cursor.fingerprint, cursor.rays, index + 1)
    return None


def brute_force_rays(T: Matrix, tol: ToleranceConfig) -> list[Ray]:
    """
    Enumerates the extreme rays of N(T) ∩ P by trying every support.

    A support S yields a ray when the columns of T indexed by S leave a
    one-dimensional null space whose generator is strictly positive on S.
    The cost is exponential in the dimension, so this is only an oracle.

    Args:
        T: The matrix whose null space is intersected with P.
        tol: The tolerance configuration.

    Returns:
        The normalised rays ordered by support.

    Raises:
        DimensionTooLargeError: Above MAX_RAY_ORACLE_DIM coordinates.
    """
    n = T.shape[1]
    if n > MAX_RAY_ORACLE_DIM:
        raise DimensionTooLargeError(
            f"Brute-force ray enumeration is capped at {MAX_RAY_ORACLE_DIM} "
            f"coordinates, got {n}"
        )
    threshold = _zero_threshold(tol)
    rays = []
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            columns = T[:, list(support)]
            _, s, vh = np.linalg.svd(columns)
            cutoff = max(tol.rank_tol * max(columns.shape), tol.zero_tol)
            rank = int(np.sum(s > cutoff))
            if size - rank != 1:
                continue
            generator = vh[-1]
            if generator.sum() < 0:
                generator = -generator
            generator = generator / float(np.max(generator))
            if np.min(generator) <= threshold:
                continue
            y = np.zeros(n)
            y[list(support)] = generator
            rays.append(Ray(y=y, support=support))
    return sorted(rays, key=lambda ray: ray.support)
