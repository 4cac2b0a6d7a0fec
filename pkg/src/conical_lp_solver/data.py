"""
Contains the problem and result file formats and their JSON I/O.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from conical_lp_solver.exceptions import MalformedProblemError
from conical_lp_solver.feasibility import FeasibilityProblem
from conical_lp_solver.linalg import ToleranceConfig, as_matrix, as_vector
from conical_lp_solver.lp_solver import LpProblem

RESULT_STATUSES = ["optimal", "feasible", "infeasible", "unsupported", "error"]


def _to_list(values: ArrayLike | None) -> Any:
    if values is None:
        return None
    return np.asarray(values, dtype=float).tolist()


@dataclass
class ProblemFile:
    """
    A problem as stored on disk.

    Attributes:
        name: A label for the instance.
        G: The coefficient matrix, row-major.
        v: The bound vector.
        f: The objective, for LP problems.
        tolerances: Overrides of the default tolerances.
    """

    name: str
    G: list[list[float]]
    v: list[float]
    f: list[float] | None = None
    tolerances: dict[str, float] | None = None

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "ProblemFile":
        """
        Validates a decoded JSON object and builds the problem file.

        Raises:
            MalformedProblemError: Naming the first offending field.
        """
        if not isinstance(payload, dict):
            raise MalformedProblemError("<root>", "expected a JSON object")
        for key in ("G", "v"):
            if key not in payload:
                raise MalformedProblemError(key, "missing")
        G = as_matrix(payload["G"], "G")
        v = as_vector(payload["v"], "v")
        if v.shape[0] != G.shape[0]:
            raise MalformedProblemError(
                "v", f"length {v.shape[0]} does not match {G.shape[0]} rows of G"
            )
        f = None
        if payload.get("f") is not None:
            f = as_vector(payload["f"], "f")
            if f.shape[0] != G.shape[1]:
                raise MalformedProblemError(
                    "f", f"length {f.shape[0]} does not match {G.shape[1]} cols of G"
                )
        tolerances = payload.get("tolerances")
        if tolerances is not None:
            if not isinstance(tolerances, dict):
                raise MalformedProblemError("tolerances", "expected an object")
            ToleranceConfig().with_overrides(**tolerances)
        return cls(
            name=str(payload.get("name", "")),
            G=G.tolist(),
            v=v.tolist(),
            f=_to_list(f),
            tolerances=tolerances,
        )

    def to_dict(self) -> dict[str, Any]:
        return {key: value for key, value in asdict(self).items() if value is not None}

    def tolerance(self, zero_tol: float | None = None) -> ToleranceConfig:
        """
        Layers the file's overrides and then zero_tol over the defaults.

        Args:
            zero_tol: A command-line override of zero_tol.

        Returns:
            The effective tolerance configuration.
        """
        config = ToleranceConfig().with_overrides(**(self.tolerances or {}))
        return config.with_overrides(zero_tol=zero_tol)

    def feasibility_problem(self) -> FeasibilityProblem:
        return FeasibilityProblem.from_values(self.G, self.v)

    def lp_problem(self) -> LpProblem:
        """
        Builds the LP problem.

        Raises:
            MalformedProblemError: If the file has no objective.
        """
        if self.f is None:
            raise MalformedProblemError("f", "an objective is required to solve an LP")
        return LpProblem.from_values(self.G, self.v, self.f)


@dataclass
class ResultFile:
    """
    The outcome of a command as stored on disk.

    Attributes:
        status: One of RESULT_STATUSES.
        h_o: The optimum value.
        x: The primal solution.
        y: The slack (feasibility) or optimal augmented slack (LP).
        generators: Calibrated generators or extreme optimal solutions.
        solutions: Domain-space solutions, one per generator.
        interior: A relative-interior point of the contact polytope.
        trace: Evolutive steps as {"h", "last_component"} objects.
        witness: The ray certifying infeasibility or unsupported tangency.
        reason: Why the problem is unsupported or which infeasibility case.
        message: The error message for error results.
        stats: Counters and timing.
    """

    status: str
    h_o: float | None = None
    x: list[float] | None = None
    y: list[float] | None = None
    generators: list[list[float]] | None = None
    solutions: list[list[float]] | None = None
    interior: list[float] | None = None
    trace: list[dict[str, float]] | None = None
    witness: list[float] | None = None
    reason: str | None = None
    message: str | None = None
    stats: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in RESULT_STATUSES:
            raise MalformedProblemError("status", f"unknown status {self.status!r}")

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "ResultFile":
        known = set(cls.__dataclass_fields__)
        unknown = set(payload) - known
        if unknown:
            raise MalformedProblemError(sorted(unknown)[0], "unknown result field")
        return cls(**payload)

    def to_dict(self) -> dict[str, Any]:
        return {key: value for key, value in asdict(self).items() if value is not None}


def _read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise MalformedProblemError("<root>", f"invalid JSON ({e})") from e


def load_problem(path: Path) -> ProblemFile:
    """
    Reads and validates a problem file.

    Args:
        path: The JSON file.

    Returns:
        The problem file.
    """
    return ProblemFile.from_dict(_read_json(path))


def load_result(path: Path) -> ResultFile:
    return ResultFile.from_dict(_read_json(path))


def dumps(document: ProblemFile | ResultFile) -> str:
    """Serialises a document with stable formatting."""
    return json.dumps(document.to_dict(), indent=2) + "\n"


def write_document(path: Path, document: ProblemFile | ResultFile) -> None:
    """
    Writes a problem or result file, creating parent directories.

    Args:
        path: The destination.
        document: The file contents.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(document))
