"""
Contains tests for the problem and result file formats.
"""

import json

import pytest
from conical_lp_solver.data import (
    ProblemFile,
    ResultFile,
    dumps,
    load_problem,
    load_result,
    write_document,
)
from conical_lp_solver.exceptions import MalformedProblemError


@pytest.mark.parametrize(
    "payload, field",
    [
        ([1, 2], "<root>"),
        ({"v": [1.0]}, "G"),
        ({"G": [[1.0]]}, "v"),
        ({"G": [[1.0], [-1.0]], "v": [1.0]}, "v"),
        ({"G": [[1.0, 2.0]], "v": [1.0], "f": [1.0]}, "f"),
        ({"G": [[1.0]], "v": [1.0], "tolerances": [1e-9]}, "tolerances"),
        ({"G": [[1.0]], "v": [1.0], "tolerances": {"zero_tol": -1.0}}, "zero_tol"),
        ({"G": [[1.0]], "v": [1.0], "tolerances": {"zero_tol": "x"}}, "zero_tol"),
        ({"G": [[1.0]], "v": [1.0], "tolerances": {"typo_tol": 1.0}}, "typo_tol"),
    ],
)
def test_problem_file_names_offending_field(payload, field: str) -> None:
    with pytest.raises(MalformedProblemError) as excinfo:
        ProblemFile.from_dict(payload)
    assert excinfo.value.field == field


def test_problem_file_accepts_integers() -> None:
    problem = ProblemFile.from_dict({"G": [[1], [-1]], "v": [2, -1]})
    assert problem.G == [[1.0], [-1.0]]
    assert problem.name == ""
    assert problem.f is None


def test_write_and_load_problem(tmp_path, interval_file: ProblemFile) -> None:
    loaded = load_problem(tmp_path / "interval.json")
    assert loaded == interval_file
    assert "tolerances" not in json.loads((tmp_path / "interval.json").read_text())


def test_load_problem_invalid_json(tmp_path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(MalformedProblemError) as excinfo:
        load_problem(path)
    assert excinfo.value.field == "<root>"


def test_tolerance_layering() -> None:
    problem = ProblemFile(
        name="layered",
        G=[[1.0]],
        v=[1.0],
        tolerances={"zero_tol": 1e-8, "ratio_tol": 1e-6},
    )
    assert problem.tolerance().zero_tol == 1e-8
    assert problem.tolerance(1e-7).zero_tol == 1e-7
    assert problem.tolerance(1e-7).ratio_tol == 1e-6
    assert ProblemFile(name="plain", G=[[1.0]], v=[1.0]).tolerance().zero_tol == 1e-9


def test_lp_problem_requires_objective() -> None:
    problem = ProblemFile(name="no-objective", G=[[1.0], [-1.0]], v=[2.0, -1.0])
    assert problem.feasibility_problem().n == 2
    with pytest.raises(MalformedProblemError) as excinfo:
        problem.lp_problem()
    assert excinfo.value.field == "f"


def test_result_file_rejects_unknown_status() -> None:
    with pytest.raises(MalformedProblemError) as excinfo:
        ResultFile(status="solved")
    assert excinfo.value.field == "status"


def test_result_file_rejects_unknown_field() -> None:
    with pytest.raises(MalformedProblemError) as excinfo:
        ResultFile.from_dict({"status": "optimal", "objective": 1.0})
    assert excinfo.value.field == "objective"


def test_result_file_omits_missing_values(tmp_path) -> None:
    result = ResultFile(status="optimal", h_o=2.0, x=[2.0], stats={"steps": 1})
    assert result.to_dict() == {
        "status": "optimal",
        "h_o": 2.0,
        "x": [2.0],
        "stats": {"steps": 1},
    }
    assert dumps(result).endswith("}\n")

    path = tmp_path / "nested" / "result.json"
    write_document(path, result)
    assert load_result(path) == result
