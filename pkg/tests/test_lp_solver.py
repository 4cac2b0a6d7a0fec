"""
Contains tests for the enumerative and evolutive LP algorithms.
"""

import numpy as np
import pytest
from conical_lp_solver.exceptions import MalformedProblemError
from conical_lp_solver.instances import generate_problem
from conical_lp_solver.linalg import ToleranceConfig
from conical_lp_solver.lp_solver import (
    LpProblem,
    LpStatus,
    augment,
    contact_points_at,
    initial_h,
    optimal_face,
    rank_drop_check,
    solve_enumerative,
    solve_evolutive,
)
from conical_lp_solver.oracle import hull_member, oracle_solve

SOLVERS = [solve_enumerative, solve_evolutive]


def test_problem_rejects_zero_objective() -> None:
    with pytest.raises(MalformedProblemError) as excinfo:
        LpProblem.from_values([[1.0], [-1.0]], [2.0, -1.0], [0.0])
    assert excinfo.value.field == "f"


def test_problem_rejects_objective_length() -> None:
    with pytest.raises(MalformedProblemError) as excinfo:
        LpProblem.from_values([[1.0], [-1.0]], [2.0, -1.0], [1.0, 1.0])
    assert excinfo.value.field == "f"


def test_augment(interval_lp: LpProblem) -> None:
    aug = augment(interval_lp, 1.25)
    np.testing.assert_array_equal(aug.G_hat, [[1.0], [-1.0], [-1.0]])
    np.testing.assert_array_equal(aug.v_hat, [2.0, -1.0, -1.25])
    assert aug.feasibility_problem.n == 3


def test_initial_h(interval_lp: LpProblem, tol: ToleranceConfig) -> None:
    # x_feas = 1.5, delta = 1.5e-3
    assert initial_h(interval_lp, tol) == pytest.approx(1.4985)


def test_initial_h_for_minimisation(tol: ToleranceConfig) -> None:
    p = LpProblem.from_values([[1.0], [-1.0]], [2.0, -1.0], [-1.0])
    h = initial_h(p, tol)
    assert h < -1.0
    assert solve_enumerative(p, tol).h_o == pytest.approx(-1.0)


@pytest.mark.parametrize("solver", SOLVERS)
def test_interval_optimum(
    solver, interval_lp: LpProblem, tol: ToleranceConfig
) -> None:
    outcome = solver(interval_lp, tol)
    assert outcome.status is LpStatus.OPTIMAL
    assert outcome.h_o == pytest.approx(2.0)
    np.testing.assert_allclose(outcome.x_o, [2.0])
    np.testing.assert_allclose(outcome.y_o, [0.0, 1.0, 0.0], atol=1e-9)


def test_interval_ray_counts(interval_lp: LpProblem, tol: ToleranceConfig) -> None:
    assert solve_enumerative(interval_lp, tol).rays_enumerated == 2
    outcome = solve_evolutive(interval_lp, tol)
    assert outcome.rays_enumerated == 1
    assert outcome.trace is not None
    assert len(outcome.trace.steps) == 1
    assert outcome.trace.steps[0].h == pytest.approx(2.0)


@pytest.mark.parametrize("solver", SOLVERS)
def test_box_optimum(solver, box_lp: LpProblem, tol: ToleranceConfig) -> None:
    outcome = solver(box_lp, tol)
    assert outcome.status is LpStatus.OPTIMAL
    assert outcome.h_o == pytest.approx(2.0)
    np.testing.assert_allclose(outcome.x_o, [1.0, 1.0])


def test_box_evolutive_trace(box_lp: LpProblem, tol: ToleranceConfig) -> None:
    outcome = solve_evolutive(box_lp, tol)
    assert outcome.trace is not None
    levels = [step.h for step in outcome.trace.steps]
    np.testing.assert_allclose(levels, [0.0, 1.0, 2.0], atol=1e-9)
    assert all(a < b for a, b in zip(levels, levels[1:]))
    assert outcome.rays_enumerated == 3
    assert outcome.rays_enumerated <= solve_enumerative(box_lp, tol).rays_enumerated
    assert outcome.rank_check_failures == 0


def test_rays_walked_counts_every_cursor_step(
    box_lp: LpProblem, tol: ToleranceConfig
) -> None:
    enum = solve_enumerative(box_lp, tol)
    assert enum.rays_walked == enum.rays_enumerated
    evo = solve_evolutive(box_lp, tol)
    # The last search walks the whole cone at the optimum and finds nothing.
    assert evo.rays_walked >= evo.rays_enumerated + 1


@pytest.mark.parametrize("scale", [0.5, 3.0, 100.0])
def test_objective_scaling(
    scale: float, box_lp: LpProblem, tol: ToleranceConfig
) -> None:
    scaled = LpProblem(G=box_lp.G, v=box_lp.v, f=scale * box_lp.f)
    outcome = solve_enumerative(scaled, tol)
    assert outcome.h_o == pytest.approx(2.0 * scale)
    np.testing.assert_allclose(outcome.x_o, [1.0, 1.0], atol=1e-8)


def test_evolutive_starting_at_optimum(
    interval_lp: LpProblem, tol: ToleranceConfig
) -> None:
    outcome = solve_evolutive(interval_lp, tol, h_start=2.0)
    assert outcome.trace is not None
    assert outcome.trace.steps == []
    assert outcome.h_o == pytest.approx(2.0)
    np.testing.assert_allclose(outcome.x_o, [2.0])


@pytest.mark.parametrize("solver", SOLVERS)
def test_infeasible_lp(solver, tol: ToleranceConfig) -> None:
    p = LpProblem.from_values([[1.0], [-1.0]], [0.0, -1.0], [1.0])
    assert solver(p, tol).status is LpStatus.INFEASIBLE


@pytest.mark.parametrize("solver", SOLVERS)
def test_unsupported_original(solver, tol: ToleranceConfig) -> None:
    p = LpProblem.from_values([[1.0]], [1.0], [1.0])
    outcome = solver(p, tol)
    assert outcome.status is LpStatus.UNSUPPORTED
    assert outcome.reason == "NotStrictlyTangent"
    assert outcome.witness is not None


@pytest.mark.parametrize("solver", SOLVERS)
def test_unsupported_augmented(solver, tol: ToleranceConfig) -> None:
    # x2 appears in no constraint, so maximising it is unbounded.
    p = LpProblem.from_values([[1.0, 0.0], [-1.0, 0.0]], [2.0, -1.0], [0.0, 1.0])
    outcome = solver(p, tol)
    assert outcome.status is LpStatus.UNSUPPORTED
    assert outcome.reason == "NotStrictlyTangentAugmented"
    np.testing.assert_allclose(outcome.witness.y, [0.0, 0.0, 1.0])


def test_rank_drop_check(tol: ToleranceConfig) -> None:
    assert not rank_drop_check(np.eye(3), tol)
    assert rank_drop_check(np.zeros((3, 3)), tol)


def test_optimal_face_unique(interval_lp: LpProblem, tol: ToleranceConfig) -> None:
    points = optimal_face(interval_lp, 2.0, tol)
    assert len(points) == 1
    np.testing.assert_allclose(points[0], [2.0])


def test_optimal_face_edge(edge_lp: LpProblem, tol: ToleranceConfig) -> None:
    outcome = solve_enumerative(edge_lp, tol, all_solutions=True)
    assert outcome.h_o == pytest.approx(1.0)
    assert outcome.optimal_extremes is not None
    points = sorted(tuple(np.round(x, 9)) for x in outcome.optimal_extremes)
    assert points == [(1.0, 0.0), (1.0, 1.0)]


def test_contact_points_at_optimum_are_tangent(
    box_lp: LpProblem, tol: ToleranceConfig
) -> None:
    h_o = solve_enumerative(box_lp, tol).h_o
    for point in contact_points_at(box_lp, h_o, tol):
        assert point[-1] <= 1e-8


def _lp_instance(seed: int, max_n: int, max_m: int) -> LpProblem:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, max_n + 1))
    m = int(rng.integers(1, min(max_m, n - 1) + 1))
    return generate_problem(seed, n, m, "lp").lp_problem()


def _check_against_oracle(
    seed: int, tol: ToleranceConfig, max_n: int = 8, max_m: int = 4
) -> None:
    p = _lp_instance(seed, max_n, max_m)
    enum = solve_enumerative(p, tol)
    evo = solve_evolutive(p, tol)
    verdict = oracle_solve(p, tol)
    assert enum.status is LpStatus.OPTIMAL
    assert evo.status is LpStatus.OPTIMAL
    assert verdict.optimum is not None
    limit = 1e-6 * (1.0 + abs(verdict.optimum))
    assert abs(enum.h_o - verdict.optimum) <= limit
    assert abs(evo.h_o - verdict.optimum) <= limit
    assert abs(evo.h_o - enum.h_o) <= 1e-8 * (1.0 + abs(enum.h_o))
    # Every step visits a distinct extreme point above the starting level.
    assert evo.rays_enumerated <= enum.rays_enumerated
    assert evo.rank_check_failures == 0
    levels = [step.h for step in evo.trace.steps]
    assert all(a < b for a, b in zip(levels, levels[1:]))
    for point in contact_points_at(p, enum.h_o, tol):
        assert point[-1] <= 1e-8


@pytest.mark.parametrize("seed", range(25))
def test_matches_oracle(seed: int, tol: ToleranceConfig) -> None:
    _check_against_oracle(seed, tol)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(25, 525))
def test_matches_oracle_full(seed: int, tol: ToleranceConfig) -> None:
    _check_against_oracle(seed, tol, max_n=12, max_m=6)


def _check_face(seed: int, tol: ToleranceConfig) -> None:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 10))
    m = int(rng.integers(2, min(5, n - 1) + 1))
    p = generate_problem(seed, n, m, "face").lp_problem()
    outcome = solve_enumerative(p, tol, all_solutions=True)
    verdict = oracle_solve(p, tol)
    assert outcome.optimal_extremes is not None
    assert len(verdict.argmax_vertices) >= 2
    for vertex in verdict.argmax_vertices:
        assert hull_member(vertex, outcome.optimal_extremes)


@pytest.mark.parametrize("seed", range(10))
def test_optimal_face_contains_oracle_argmax(seed: int, tol: ToleranceConfig) -> None:
    _check_face(seed, tol)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10, 60))
def test_optimal_face_contains_oracle_argmax_full(
    seed: int, tol: ToleranceConfig
) -> None:
    _check_face(seed, tol)


def _step_counts(seed: int, tol: ToleranceConfig) -> tuple[int, int, int, int]:
    p = _lp_instance(seed, 8, 4)
    extreme_points = len(contact_points_at(p, initial_h(p, tol), tol))
    enum = solve_enumerative(p, tol)
    evo = solve_evolutive(p, tol)
    steps = len(evo.trace.steps)
    return extreme_points, steps, evo.rays_enumerated, enum.rays_enumerated


@pytest.mark.parametrize("seed", range(25))
def test_evolutive_steps_bounded_by_extreme_points(
    seed: int, tol: ToleranceConfig
) -> None:
    extreme_points, steps, _, _ = _step_counts(seed, tol)
    assert steps <= extreme_points


def _check_efficiency(seeds: range, tol: ToleranceConfig) -> None:
    eligible = []
    for seed in seeds:
        extreme_points, _, evo_rays, enum_rays = _step_counts(seed, tol)
        assert evo_rays <= enum_rays
        if extreme_points >= 3:
            eligible.append(evo_rays < enum_rays)
    assert eligible
    assert sum(eligible) >= 0.2 * len(eligible)


def test_evolutive_is_strictly_cheaper_on_a_fifth(tol: ToleranceConfig) -> None:
    _check_efficiency(range(40), tol)


@pytest.mark.slow
def test_evolutive_is_strictly_cheaper_on_a_fifth_full(tol: ToleranceConfig) -> None:
    _check_efficiency(range(500), tol)
