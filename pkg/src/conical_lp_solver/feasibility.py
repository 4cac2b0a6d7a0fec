"""
Decides feasibility of linear inequality systems G x <= v with the primal
conical method.

The bound is split into its projection v_F on the range F of G and the
orthogonal remainder upsilon. Under strict tangency of F to the non-negative
orthant P, the system is feasible iff the extended subspace span(upsilon) + F
meets P in a ray whose calibration ratio beta is positive. Calibrating every
such ray gives the extreme points of the contact polytope (v + F) ∩ P, which
is the set of all feasible slack vectors.
"""

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike

from conical_lp_solver.cone_gen import Ray, enumerate_rays
from conical_lp_solver.exceptions import (
    InconsistentRatiosError,
    InfeasibleProblemError,
    MalformedProblemError,
    NotStrictlyTangentError,
    NumericalFailureError,
    ZeroBetaError,
)
from conical_lp_solver.linalg import (
    Matrix,
    ProjectorSet,
    ToleranceConfig,
    Vector,
    as_matrix,
    as_vector,
    build_projector_set,
    max_abs,
    projector_onto_range,
    solve_consistent,
)
from conical_lp_solver.utils import logger


@dataclass(frozen=True, eq=False)
class FeasibilityProblem:
    """
    The inequality system G x <= v.

    Attributes:
        G: The n x m coefficient matrix.
        v: The bound vector of length n.
    """

    G: Matrix
    v: Vector

    @classmethod
    def from_values(cls, G: ArrayLike, v: ArrayLike) -> "FeasibilityProblem":
        """Validates raw values and builds the problem."""
        return cls(G=as_matrix(G, "G"), v=as_vector(v, "v"))

    def __post_init__(self) -> None:
        if self.G.shape[0] != self.v.shape[0]:
            raise MalformedProblemError(
                "v", f"length {self.v.shape[0]} does not match {self.G.shape[0]} rows"
            )

    @property
    def n(self) -> int:
        return int(self.G.shape[0])

    @property
    def m(self) -> int:
        return int(self.G.shape[1])


@dataclass(frozen=True, eq=False)
class BoundDecomposition:
    """
    The orthogonal decomposition v = v_F + upsilon.

    Attributes:
        v_F: The projection of v onto the range of G.
        upsilon: The projection of v onto the orthogonal complement.
        z: The minimum-norm preimage, G z = v_F.
        P_F: The projector onto the range of G used to build the split.
    """

    v_F: Vector
    upsilon: Vector
    z: Vector
    P_F: Matrix


@dataclass(frozen=True, eq=False)
class CalibratedGenerator:
    """
    An extreme ray of the extended cone with its calibration.

    Attributes:
        ray: The normalised ray y.
        beta: The common ratio (P_Fperp y)_i / upsilon_i.
        w: y / beta, a point of the contact polytope, when beta > 0.
    """

    ray: Ray
    beta: float
    w: Vector | None


class FeasibilityStatus(StrEnum):
    TRIVIAL_FEASIBLE = "trivial_feasible"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


class TrivialReason(StrEnum):
    V_IN_P = "v_in_p"
    UPSILON_IN_P = "upsilon_in_p"
    UPSILON_ZERO = "upsilon_zero"


class InfeasibleCase(StrEnum):
    STRICTLY_TANGENT_FE = "strictly_tangent_fe"
    NEGATIVE_BETA = "negative_beta"


@dataclass(frozen=True, eq=False)
class FeasibilityOutcome:
    """
    The verdict of the feasibility algorithm.

    Attributes:
        status: Trivially feasible, feasible or infeasible.
        x: A solution of G x <= v when feasible.
        trivial_reason: Which shortcut produced a trivial solution.
        generators: The calibrated generators found (all of them when
                    requested, otherwise the first).
        infeasible_case: Why the system is infeasible.
        witness: The ray evidencing a negative beta.
        rays_enumerated: The number of extreme rays of the extended cone.
    """

    status: FeasibilityStatus
    x: Vector | None = None
    trivial_reason: TrivialReason | None = None
    generators: list[CalibratedGenerator] = field(default_factory=list)
    infeasible_case: InfeasibleCase | None = None
    witness: Ray | None = None
    rays_enumerated: int = 0

    @property
    def is_feasible(self) -> bool:
        return self.status is not FeasibilityStatus.INFEASIBLE


@dataclass(frozen=True, eq=False)
class TangencyStatus:
    """
    Whether the range of a matrix meets P only at the origin.

    Attributes:
        strictly_tangent: True when R(G) ∩ P = {0}.
        witness: A ray of R(G) ∩ P when strict tangency is violated.
    """

    strictly_tangent: bool
    witness: Ray | None = None


@dataclass(frozen=True, eq=False)
class ContactPolytope:
    """
    The polytope (v + R(G)) ∩ P of feasible slack vectors.

    Attributes:
        extreme_points: The calibrated generators w.
        dim_ambient: The dimension n of the slack space.
    """

    extreme_points: list[Vector]
    dim_ambient: int


def decompose_bound(p: FeasibilityProblem, tol: ToleranceConfig) -> BoundDecomposition:
    """
    Splits v into its projection on the range of G and the orthogonal
    remainder.

    Args:
        p: The feasibility problem.
        tol: The tolerance configuration.

    Returns:
        The bound decomposition with a preimage z of v_F.
    """
    P_F = projector_onto_range(p.G, tol)
    v_F = P_F @ p.v
    upsilon = p.v - v_F
    z = solve_consistent(p.G, v_F, tol)
    return BoundDecomposition(v_F=v_F, upsilon=upsilon, z=z, P_F=P_F)


def check_strict_tangency(G: Matrix, tol: ToleranceConfig) -> TangencyStatus:
    """
    Checks that the range of G meets the non-negative orthant only at 0.

    Args:
        G: The coefficient matrix.
        tol: The tolerance configuration.

    Returns:
        The tangency status, with a witness ray of R(G) ∩ P when violated.
    """
    P_F = projector_onto_range(G, tol)
    rays = enumerate_rays(np.eye(G.shape[0]) - P_F, tol)
    if rays:
        return TangencyStatus(strictly_tangent=False, witness=rays[0])
    return TangencyStatus(strictly_tangent=True)


def calibrate(
    y: Ray, dec: BoundDecomposition, projs: ProjectorSet, tol: ToleranceConfig
) -> CalibratedGenerator:
    """
    Calibrates a ray of the extended cone onto the affine slice
    upsilon + R(G).

    Args:
        y: A ray of N(T) ∩ P for T = projs.T.
        dec: The bound decomposition (upsilon must be non-zero).
        projs: The projector set of the decomposition.
        tol: The tolerance configuration.

    Returns:
        The calibrated generator. w is only set when beta > 0; a negative beta
        is evidence of infeasibility.

    Raises:
        ZeroBetaError: If the ray projects to zero on the complement of F.
        InconsistentRatiosError: If the ratios disagree beyond ratio_tol.
    """
    upsilon = dec.upsilon
    projected = projs.P_Fperp @ y.y
    if max_abs(projected) <= tol.zero_tol * (1.0 + max_abs(y.y)):
        raise ZeroBetaError(f"Ray with support {y.support} has beta = 0")
    defined = np.abs(upsilon) > tol.threshold(upsilon)
    if not np.any(defined):
        raise ZeroBetaError("Calibration needs a non-zero upsilon")
    beta = float(projected[defined] @ upsilon[defined]) / float(
        upsilon[defined] @ upsilon[defined]
    )
    disagreement = max_abs(projected - beta * upsilon)
    if disagreement > tol.ratio_tol * (1.0 + max_abs(projected)):
        raise InconsistentRatiosError(
            f"Calibration ratios of ray {y.support} disagree by {disagreement:.3e}"
        )
    if beta < 0:
        return CalibratedGenerator(ray=y, beta=beta, w=None)
    return CalibratedGenerator(ray=y, beta=beta, w=y.y / beta)


def _trivial_solution(
    p: FeasibilityProblem, dec: BoundDecomposition, tol: ToleranceConfig
) -> FeasibilityOutcome | None:
    threshold = tol.threshold(p.G, p.v)
    if np.all(p.v >= -threshold):
        return FeasibilityOutcome(
            status=FeasibilityStatus.TRIVIAL_FEASIBLE,
            x=np.zeros(p.m),
            trivial_reason=TrivialReason.V_IN_P,
        )
    if max_abs(dec.upsilon) <= threshold:
        return FeasibilityOutcome(
            status=FeasibilityStatus.TRIVIAL_FEASIBLE,
            x=dec.z,
            trivial_reason=TrivialReason.UPSILON_ZERO,
        )
    if np.all(dec.upsilon >= -threshold):
        return FeasibilityOutcome(
            status=FeasibilityStatus.TRIVIAL_FEASIBLE,
            x=dec.z,
            trivial_reason=TrivialReason.UPSILON_IN_P,
        )
    return None


def calibrate_all(
    rays: list[Ray], dec: BoundDecomposition, projs: ProjectorSet, tol: ToleranceConfig
) -> list[CalibratedGenerator]:
    """
    Calibrates every ray and checks that beta keeps one sign across them.

    Args:
        rays: The rays of N(T) ∩ P.
        dec: The bound decomposition.
        projs: The projector set.
        tol: The tolerance configuration.

    Returns:
        The calibrated generators in ray order.

    Raises:
        NumericalFailureError: If the signs of beta differ.
    """
    generators = [calibrate(ray, dec, projs, tol) for ray in rays]
    signs = {gen.beta > 0 for gen in generators}
    if len(signs) > 1:
        raise NumericalFailureError("Calibration ratios change sign across rays")
    return generators


def _check_witness(p: FeasibilityProblem, x: Vector, tol: ToleranceConfig) -> None:
    excess = float(np.max(p.G @ x - p.v))
    if excess > tol.threshold(p.G, p.v) * (1.0 + max_abs(x)):
        raise NumericalFailureError(
            f"Feasible witness violates G x <= v by {excess:.3e}"
        )


def solve_feasibility(
    p: FeasibilityProblem, tol: ToleranceConfig, want_all: bool = False
) -> FeasibilityOutcome:
    """
    Runs the primal conical feasibility algorithm.

    Trivial solutions are returned first (v in P gives x = 0, upsilon zero or
    in P gives x = z). Otherwise the extended cone N(I - P_V - P_F) ∩ P is
    searched: no ray, or a first ray with negative beta, means infeasible;
    a positive beta gives the solution of G x = v - w.

    Args:
        p: The feasibility problem.
        tol: The tolerance configuration.
        want_all: Whether to calibrate every generator rather than the first.

    Returns:
        The feasibility outcome.

    Raises:
        NotStrictlyTangentError: If R(G) meets P outside the origin.
    """
    tangency = check_strict_tangency(p.G, tol)
    if not tangency.strictly_tangent:
        raise NotStrictlyTangentError(
            "The range of G meets the non-negative orthant outside the origin",
            witness=tangency.witness,
        )

    dec = decompose_bound(p, tol)
    trivial = _trivial_solution(p, dec, tol)
    if trivial is not None:
        logger.debug(f"Trivial solution: {trivial.trivial_reason}")
        return trivial

    projs = build_projector_set(dec.P_F, dec.upsilon, tol, p.G, p.v)
    rays = enumerate_rays(projs.T, tol)
    if not rays:
        return FeasibilityOutcome(
            status=FeasibilityStatus.INFEASIBLE,
            infeasible_case=InfeasibleCase.STRICTLY_TANGENT_FE,
        )

    first = calibrate(rays[0], dec, projs, tol)
    if first.w is None:
        return FeasibilityOutcome(
            status=FeasibilityStatus.INFEASIBLE,
            infeasible_case=InfeasibleCase.NEGATIVE_BETA,
            witness=first.ray,
            rays_enumerated=len(rays),
        )

    generators = calibrate_all(rays, dec, projs, tol) if want_all else [first]
    x = solve_consistent(p.G, p.v - first.w, tol)
    _check_witness(p, x, tol)
    return FeasibilityOutcome(
        status=FeasibilityStatus.FEASIBLE,
        x=x,
        generators=generators,
        rays_enumerated=len(rays),
    )


def contact_polytope(p: FeasibilityProblem, tol: ToleranceConfig) -> ContactPolytope:
    """
    Builds the contact polytope explicitly from all calibrated generators.

    Args:
        p: A feasible, strictly tangent problem with non-zero upsilon.
        tol: The tolerance configuration.

    Returns:
        The contact polytope with its extreme points.

    Raises:
        NotStrictlyTangentError: If R(G) meets P outside the origin.
        InfeasibleProblemError: If the problem is infeasible or upsilon is 0.
    """
    tangency = check_strict_tangency(p.G, tol)
    if not tangency.strictly_tangent:
        raise NotStrictlyTangentError(
            "The range of G meets the non-negative orthant outside the origin",
            witness=tangency.witness,
        )
    dec = decompose_bound(p, tol)
    if max_abs(dec.upsilon) <= tol.threshold(p.G, p.v):
        raise InfeasibleProblemError(
            "The contact polytope is not described by generators when upsilon = 0"
        )
    projs = build_projector_set(dec.P_F, dec.upsilon, tol, p.G, p.v)
    generators = calibrate_all(enumerate_rays(projs.T, tol), dec, projs, tol)
    points = [gen.w for gen in generators if gen.w is not None]
    if not points:
        raise InfeasibleProblemError("The problem is infeasible")
    check_no_proportional_points(points, tol)
    return ContactPolytope(extreme_points=points, dim_ambient=p.n)


def check_no_proportional_points(points: list[Vector], tol: ToleranceConfig) -> None:
    """
    Checks that no two extreme points of a contact polytope lie on one ray
    from the origin.

    Points are compared after scaling to unit max-norm, with ratio_tol as
    the distance threshold.

    Raises:
        NumericalFailureError: If two points are positive multiples of each
                               other.
    """
    directions = [point / max_abs(point) for point in points]
    for i, first in enumerate(directions):
        for j in range(i + 1, len(directions)):
            if max_abs(first - directions[j]) <= tol.ratio_tol:
                raise NumericalFailureError(
                    f"Extreme points {i} and {j} are proportional"
                )


def solutions_from_generators(
    p: FeasibilityProblem, generators: list[CalibratedGenerator], tol: ToleranceConfig
) -> list[Vector]:
    """
    Solves G x = v - w for each calibrated generator w.

    Args:
        p: The feasibility problem.
        generators: Calibrated generators with positive beta.
        tol: The tolerance configuration.

    Returns:
        One domain-space solution per generator.
    """
    return [
        solve_consistent(p.G, p.v - gen.w, tol)
        for gen in generators
        if gen.w is not None
    ]


def relative_interior_point(cp: ContactPolytope) -> Vector:
    """
    Computes a point in the relative interior of the contact polytope.

    Args:
        cp: A non-empty contact polytope.

    Returns:
        The mean of the extreme points, a convex combination with all weights
        positive.
    """
    return np.mean(np.vstack(cp.extreme_points), axis=0)
