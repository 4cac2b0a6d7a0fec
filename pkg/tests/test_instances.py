"""
Contains tests for seeded instance generation.
"""

import numpy as np
import pytest
from conical_lp_solver.exceptions import MalformedProblemError
from conical_lp_solver.feasibility import check_strict_tangency
from conical_lp_solver.instances import generate_problem, strictly_tangent_matrix
from conical_lp_solver.linalg import ToleranceConfig
from conical_lp_solver.lp_solver import augment
from conical_lp_solver.oracle import oracle_solve
from conical_lp_solver.utils import INSTANCE_KINDS


def test_generation_is_deterministic() -> None:
    first = generate_problem(3, 6, 2, "lp")
    assert first == generate_problem(3, 6, 2, "lp")
    assert first != generate_problem(4, 6, 2, "lp")
    assert first.name == "lp-n6-m2-s3"


def test_strictly_tangent_matrix_shape(rng: np.random.Generator) -> None:
    G = strictly_tangent_matrix(rng, 7, 3)
    assert G.shape == (7, 3)


@pytest.mark.parametrize("kind", INSTANCE_KINDS)
@pytest.mark.parametrize("seed", range(5))
def test_generated_matrix_is_strictly_tangent(
    kind: str, seed: int, tol: ToleranceConfig
) -> None:
    p = generate_problem(seed, 6, 3, kind).feasibility_problem()
    assert check_strict_tangency(p.G, tol).strictly_tangent


@pytest.mark.parametrize("kind", ["lp", "face"])
@pytest.mark.parametrize("seed", range(5))
def test_augmented_matrix_is_strictly_tangent(
    kind: str, seed: int, tol: ToleranceConfig
) -> None:
    p = generate_problem(seed, 6, 3, kind).lp_problem()
    assert check_strict_tangency(augment(p, 0.0).G_hat, tol).strictly_tangent


@pytest.mark.parametrize("kind", ["feasible", "lp", "face"])
@pytest.mark.parametrize("seed", range(5))
def test_feasible_kinds_are_feasible(
    kind: str, seed: int, tol: ToleranceConfig
) -> None:
    p = generate_problem(seed, 7, 3, kind).feasibility_problem()
    assert oracle_solve(p, tol).feasible


def test_only_objective_kinds_have_objectives() -> None:
    assert generate_problem(0, 5, 2, "feasible").f is None
    assert generate_problem(0, 5, 2, "unrestricted").f is None
    assert len(generate_problem(0, 5, 2, "lp").f) == 2


@pytest.mark.parametrize(
    "n, m, kind, field",
    [
        (1, 1, "lp", "n"),
        (3, 3, "lp", "m"),
        (3, 0, "feasible", "m"),
        (4, 1, "face", "m"),
        (4, 2, "cube", "kind"),
    ],
)
def test_generation_rejects_invalid_arguments(
    n: int, m: int, kind: str, field: str
) -> None:
    with pytest.raises(MalformedProblemError) as excinfo:
        generate_problem(0, n, m, kind)
    assert excinfo.value.field == field
