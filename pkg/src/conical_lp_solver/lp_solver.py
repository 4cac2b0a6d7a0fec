"""
Maximises a linear objective f x over G x <= v with the internal primal
conical algorithm.

The problem is rewritten as a feasibility question parameterised by the
objective level h: append the row -f to G and the entry -h to v. Starting
from a level h below the optimum, the calibrated generators of the augmented
extended cone are the extreme points of the contact polytope, and the optimum
is h + h_m, where h_m is their largest last component. The enumerative
version computes all generators at once; the evolutive version raises h after
every generator found with a positive last component and stops when none is
left.
"""

import time
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike

from conical_lp_solver.cone_gen import Ray, enumerate_rays, next_ray, open_cursor
from conical_lp_solver.exceptions import (
    InfeasibleProblemError,
    IterationCapError,
    MalformedProblemError,
    NotStrictlyTangentError,
    NumericalFailureError,
)
from conical_lp_solver.feasibility import (
    BoundDecomposition,
    CalibratedGenerator,
    FeasibilityProblem,
    calibrate,
    calibrate_all,
    check_strict_tangency,
    solve_feasibility,
)
from conical_lp_solver.linalg import (
    Matrix,
    ProjectorSet,
    ToleranceConfig,
    Vector,
    as_matrix,
    as_vector,
    build_projector_set,
    matrix_rank,
    max_abs,
    projector_onto_range,
    solve_consistent,
)
from conical_lp_solver.utils import INITIAL_H_MARGIN, MAX_RAYS_EXAMINED, logger


@dataclass(frozen=True, eq=False)
class LpProblem:
    """
    The problem max f x subject to G x <= v.

    Attributes:
        G: The n x m coefficient matrix.
        v: The bound vector of length n.
        f: The objective of length m (not zero).
    """

    G: Matrix
    v: Vector
    f: Vector

    @classmethod
    def from_values(cls, G: ArrayLike, v: ArrayLike, f: ArrayLike) -> "LpProblem":
        """Validates raw values and builds the problem."""
        return cls(G=as_matrix(G, "G"), v=as_vector(v, "v"), f=as_vector(f, "f"))

    def __post_init__(self) -> None:
        if self.G.shape[0] != self.v.shape[0]:
            raise MalformedProblemError(
                "v", f"length {self.v.shape[0]} does not match {self.G.shape[0]} rows"
            )
        if self.G.shape[1] != self.f.shape[0]:
            raise MalformedProblemError(
                "f", f"length {self.f.shape[0]} does not match {self.G.shape[1]} cols"
            )
        if not np.any(self.f):
            raise MalformedProblemError("f", "the objective must not be zero")

    @property
    def n(self) -> int:
        return int(self.G.shape[0])

    @property
    def feasibility_problem(self) -> FeasibilityProblem:
        return FeasibilityProblem(G=self.G, v=self.v)


@dataclass(frozen=True, eq=False)
class AugmentedProblem:
    """
    The parameterised feasibility form of an LP at objective level h.

    Attributes:
        G_hat: G with the row -f appended.
        v_hat_base: v with the entry 0 appended.
        h: The objective level.
    """

    G_hat: Matrix
    v_hat_base: Vector
    h: float

    @property
    def v_hat(self) -> Vector:
        """The bound v_hat(h): v with -h appended."""
        shift = np.zeros_like(self.v_hat_base)
        shift[-1] = self.h
        return self.v_hat_base - shift

    @property
    def feasibility_problem(self) -> FeasibilityProblem:
        """The system {x : G x <= v, f x >= h} as G_hat x <= v_hat(h)."""
        return FeasibilityProblem(G=self.G_hat, v=self.v_hat)


class LpStatus(StrEnum):
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class TraceStep:
    """
    One update of the evolutive algorithm.

    Attributes:
        h: The objective level after the update.
        generator_last_component: The last component of the calibrated
                                  generator that produced the update.
        rays_examined: Rays with a positive test component examined so far.
    """

    h: float
    generator_last_component: float
    rays_examined: int


@dataclass
class EvolutiveTrace:
    """The sequence of objective levels visited by the evolutive algorithm."""

    steps: list[TraceStep] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class LpOutcome:
    """
    The result of an LP solve.

    Attributes:
        status: Infeasible, optimal or unsupported.
        h_o: The optimum value.
        x_o: An optimal solution.
        y_o: The optimal slack of the augmented system at h_o.
        optimal_extremes: The extreme optimal solutions, when requested.
        reason: Why the instance is unsupported.
        witness: The ray violating strict tangency, for unsupported results.
        trace: The evolutive trace (evolutive mode only).
        rays_enumerated: Rays enumerated (enumerative) or positive rays
                         reached (evolutive).
        rays_walked: Rays the cursors stepped over, including those with a
                     zero test component and the final exhausted walk.
        retries: Restarts caused by a zero orthogonal bound component.
        rank_check_failures: Evolutive steps where the rank-preservation
                             diagnostic failed.
        wall_ms: Wall time of the solve in milliseconds.
    """

    status: LpStatus
    h_o: float | None = None
    x_o: Vector | None = None
    y_o: Vector | None = None
    optimal_extremes: list[Vector] | None = None
    reason: str | None = None
    witness: Ray | None = None
    trace: EvolutiveTrace | None = None
    rays_enumerated: int = 0
    rays_walked: int = 0
    retries: int = 0
    rank_check_failures: int = 0
    wall_ms: float = 0.0


def augment(p: LpProblem, h: float) -> AugmentedProblem:
    """
    Builds the augmented problem at objective level h.

    Args:
        p: The LP problem.
        h: The objective level.

    Returns:
        The augmented problem, whose feasible set is {x : G x <= v, f x >= h}.
    """
    G_hat = np.vstack([p.G, -p.f[np.newaxis, :]])
    v_hat_base = np.append(p.v, 0.0)
    return AugmentedProblem(G_hat=G_hat, v_hat_base=v_hat_base, h=float(h))


def _margin(value: float) -> float:
    return max(1.0, abs(value)) * INITIAL_H_MARGIN


def initial_h(p: LpProblem, tol: ToleranceConfig) -> float:
    """
    Picks an objective level strictly below the optimum.

    Args:
        p: The LP problem.
        tol: The tolerance configuration.

    Returns:
        f x_feas - delta, where x_feas is a feasible point and
        delta = max(1, |f x_feas|) * INITIAL_H_MARGIN.

    Raises:
        NotStrictlyTangentError: If R(G) meets P outside the origin.
        InfeasibleProblemError: If G x <= v has no solution.
    """
    outcome = solve_feasibility(p.feasibility_problem, tol)
    if not outcome.is_feasible or outcome.x is None:
        raise InfeasibleProblemError("The constraints G x <= v are infeasible")
    value = float(p.f @ outcome.x)
    return value - _margin(value)


class _AugmentedCone:
    """
    The extended cone of the augmented problem as a function of h.

    The projector onto R(G_hat) is computed once; only the projector onto
    upsilon(h) changes with h.
    """

    def __init__(self, p: LpProblem, tol: ToleranceConfig) -> None:
        self.problem = p
        self.tol = tol
        self.base = augment(p, 0.0)
        self.P_F = projector_onto_range(self.base.G_hat, tol)
        self.P_Fperp = np.eye(p.n + 1) - self.P_F
        self.last = p.n

    def at(self, h: float) -> tuple[BoundDecomposition, ProjectorSet] | None:
        """
        Decomposes v_hat(h) and builds its projectors.

        Returns:
            None when upsilon(h) is numerically zero.
        """
        aug = augment(self.problem, h)
        v_hat = aug.v_hat
        upsilon = self.P_Fperp @ v_hat
        if max_abs(upsilon) <= self.tol.threshold(aug.G_hat, v_hat):
            return None
        v_F = v_hat - upsilon
        dec = BoundDecomposition(
            v_F=v_F,
            upsilon=upsilon,
            z=solve_consistent(aug.G_hat, v_F, self.tol),
            P_F=self.P_F,
        )
        return dec, build_projector_set(
            self.P_F, upsilon, self.tol, aug.G_hat, v_hat
        )

    def generators(
        self, dec: BoundDecomposition, projs: ProjectorSet
    ) -> list[CalibratedGenerator]:
        """Calibrates every ray of the extended cone."""
        return calibrate_all(enumerate_rays(projs.T, self.tol), dec, projs, self.tol)

    def solution(self, h: float, slack: Vector) -> Vector:
        """Solves G_hat x = v_hat(h) - slack."""
        aug = augment(self.problem, h)
        return solve_consistent(aug.G_hat, aug.v_hat - slack, self.tol)


def _screen(p: LpProblem, tol: ToleranceConfig) -> LpOutcome | float:
    """
    Runs the strict-tangency and feasibility screens.

    Returns:
        A terminal outcome, or the initial objective level.
    """
    try:
        h = initial_h(p, tol)
    except NotStrictlyTangentError as e:
        logger.warning(f"Unsupported LP: {e}")
        return LpOutcome(
            status=LpStatus.UNSUPPORTED,
            reason="NotStrictlyTangent",
            witness=e.witness,
        )
    except InfeasibleProblemError:
        return LpOutcome(status=LpStatus.INFEASIBLE)

    tangency = check_strict_tangency(augment(p, h).G_hat, tol)
    if not tangency.strictly_tangent:
        logger.warning("Unsupported LP: augmented matrix is not strictly tangent")
        return LpOutcome(
            status=LpStatus.UNSUPPORTED,
            reason="NotStrictlyTangentAugmented",
            witness=tangency.witness,
        )
    return h


def _certify(
    p: LpProblem, cone: _AugmentedCone, h_o: float, y_o: Vector
) -> Vector:
    tol = cone.tol
    threshold = tol.threshold(p.G, p.v, p.f, h_o)
    if float(np.min(y_o)) < -threshold or abs(float(y_o[-1])) > threshold:
        raise NumericalFailureError("Optimal slack is not tangent to the orthant")
    x_o = cone.solution(h_o, y_o)
    scale = 1.0 + max_abs(x_o)
    if float(np.max(p.G @ x_o - p.v)) > threshold * scale:
        raise NumericalFailureError("Optimal solution violates G x <= v")
    if abs(float(p.f @ x_o) - h_o) > threshold * scale:
        raise NumericalFailureError("Optimal solution does not attain h_o")
    return x_o


def _elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def solve_enumerative(
    p: LpProblem, tol: ToleranceConfig, all_solutions: bool = False
) -> LpOutcome:
    """
    Runs the enumerative internal algorithm.

    All calibrated generators of the augmented cone at the initial level h
    are computed; the optimum is h + h_m, with h_m the largest last component.

    Args:
        p: The LP problem.
        tol: The tolerance configuration.
        all_solutions: Whether to describe the optimal face as well.

    Returns:
        The LP outcome.
    """
    start = time.perf_counter()
    screened = _screen(p, tol)
    if isinstance(screened, LpOutcome):
        return screened
    h = screened
    cone = _AugmentedCone(p, tol)

    retries = 0
    state = cone.at(h)
    if state is None:
        # Zero slack at h: step down once and retry.
        retries += 1
        h -= _margin(h)
        state = cone.at(h)
        if state is None:
            raise NumericalFailureError("upsilon(h) vanished twice")
    dec, projs = state
    generators = cone.generators(dec, projs)
    if not generators or generators[0].w is None:
        raise NumericalFailureError(f"Augmented problem infeasible at h = {h}")

    best = max(generators, key=lambda gen: float(gen.w[cone.last]))
    h_m = float(best.w[cone.last])
    h_o = h + h_m
    y_o = best.w.copy()
    y_o[cone.last] -= h_m
    x_o = _certify(p, cone, h_o, y_o)
    logger.info(f"Enumerative solve: h = {h:.6g}, h_m = {h_m:.6g}, h_o = {h_o:.6g}")

    return LpOutcome(
        status=LpStatus.OPTIMAL,
        h_o=h_o,
        x_o=x_o,
        y_o=y_o,
        optimal_extremes=optimal_face(p, h_o, tol) if all_solutions else None,
        rays_enumerated=len(generators),
        rays_walked=len(generators),
        retries=retries,
        wall_ms=_elapsed_ms(start),
    )


def rank_drop_check(T: Matrix, tol: ToleranceConfig) -> bool:
    """
    Checks that deleting the last column of T keeps its rank.

    This holds at every level h below the optimum, because there a generator
    with a non-zero last component exists.

    Args:
        T: The projector I - P_V - P_F of the augmented problem.
        tol: The tolerance configuration.

    Returns:
        True when both ranks agree.
    """
    floor = tol.zero_tol * (1.0 + max_abs(T))
    return matrix_rank(T, tol, floor) == matrix_rank(T[:, :-1], tol, floor)


def solve_evolutive(
    p: LpProblem,
    tol: ToleranceConfig,
    all_solutions: bool = False,
    h_start: float | None = None,
) -> LpOutcome:
    """
    Runs the evolutive internal algorithm.

    Each step searches for the next generator with a positive last component,
    using the last coordinate as test column, and raises h by the last
    component of its calibration. The loop ends when no such generator is
    left, and the current h is the optimum.

    Args:
        p: The LP problem.
        tol: The tolerance configuration.
        all_solutions: Whether to describe the optimal face as well.
        h_start: Start from this level instead of initial_h (it must not
                 exceed the optimum).

    Returns:
        The LP outcome with its evolutive trace.

    Raises:
        IterationCapError: If more than MAX_RAYS_EXAMINED rays are examined.
    """
    start = time.perf_counter()
    screened = _screen(p, tol)
    if isinstance(screened, LpOutcome):
        return screened
    h = screened if h_start is None else float(h_start)
    cone = _AugmentedCone(p, tol)

    trace = EvolutiveTrace()
    retries = 0
    rank_check_failures = 0
    rays_examined = 0
    rays_walked = 0
    last_generator: CalibratedGenerator | None = None
    while True:
        state = cone.at(h)
        if state is None:
            if retries:
                raise NumericalFailureError("upsilon(h) vanished twice")
            retries += 1
            h -= _margin(h)
            last_generator = None
            continue
        dec, projs = state
        cursor = open_cursor(projs.T, tol)
        found = next_ray(projs.T, cursor, cone.last, tol)
        if found is None:
            rays_walked += len(cursor.rays)
            break
        ray, cursor = found
        rays_examined += 1
        rays_walked += cursor.index
        if rays_examined > MAX_RAYS_EXAMINED:
            raise IterationCapError(f"Examined more than {MAX_RAYS_EXAMINED} rays")
        generator = calibrate(ray, dec, projs, tol)
        if generator.w is None:
            raise NumericalFailureError(f"Augmented problem infeasible at h = {h}")
        if not rank_drop_check(projs.T, tol):
            rank_check_failures += 1
            logger.warning(f"Rank-preservation diagnostic failed at h = {h:.6g}")
        step = float(generator.w[cone.last])
        h += step
        last_generator = generator
        trace.steps.append(
            TraceStep(h=h, generator_last_component=step, rays_examined=rays_examined)
        )
        logger.info(f"Evolutive step {len(trace.steps)}: h = {h:.6g}")

    h_o = h
    if last_generator is not None:
        y_o = last_generator.w.copy()
        y_o[cone.last] = 0.0
    else:
        # Started at the optimum: any extreme point of the contact polytope.
        generators = cone.generators(dec, projs)
        if not generators or generators[0].w is None:
            raise NumericalFailureError(f"Augmented problem infeasible at h = {h}")
        y_o = generators[0].w.copy()
    x_o = _certify(p, cone, h_o, y_o)
    logger.info(f"Evolutive solve: {len(trace.steps)} steps, h_o = {h_o:.6g}")

    return LpOutcome(
        status=LpStatus.OPTIMAL,
        h_o=h_o,
        x_o=x_o,
        y_o=y_o,
        optimal_extremes=optimal_face(p, h_o, tol) if all_solutions else None,
        trace=trace,
        rays_enumerated=rays_examined,
        rays_walked=rays_walked,
        retries=retries,
        rank_check_failures=rank_check_failures,
        wall_ms=_elapsed_ms(start),
    )


def contact_points_at(
    p: LpProblem, h: float, tol: ToleranceConfig
) -> list[Vector]:
    """
    Computes the extreme points of the augmented contact polytope P_c(h).

    Args:
        p: The LP problem.
        h: An objective level not above the optimum.
        tol: The tolerance configuration.

    Returns:
        The calibrated generators, or the single zero-free slack v_hat(h) -
        G_hat x when upsilon(h) vanishes.
    """
    cone = _AugmentedCone(p, tol)
    state = cone.at(h)
    if state is None:
        return [np.zeros(p.n + 1)]
    generators = cone.generators(*state)
    if not generators or generators[0].w is None:
        raise InfeasibleProblemError(f"The augmented problem is infeasible at h = {h}")
    return [gen.w for gen in generators]


def optimal_face(p: LpProblem, h_o: float, tol: ToleranceConfig) -> list[Vector]:
    """
    Describes the set of optimal solutions by its extreme points.

    Args:
        p: The LP problem.
        h_o: The optimum value from a completed solve.
        tol: The tolerance configuration.

    Returns:
        One domain-space solution per extreme point of P_c(h_o); every
        optimal solution is a convex combination of them (plus directions
        in the null space of G).
    """
    cone = _AugmentedCone(p, tol)
    solutions = [cone.solution(h_o, slack) for slack in contact_points_at(p, h_o, tol)]
    threshold = tol.threshold(p.G, p.v, p.f, h_o)
    for x in solutions:
        scale = 1.0 + max_abs(x)
        if float(np.max(p.G @ x - p.v)) > threshold * scale:
            raise NumericalFailureError("Optimal face point violates G x <= v")
        if abs(float(p.f @ x) - h_o) > threshold * scale:
            raise NumericalFailureError("Optimal face point does not attain h_o")
    return solutions
