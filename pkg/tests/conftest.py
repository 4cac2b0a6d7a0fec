"""
Contains pytest fixtures for tests, such as small hand-checked problems.
"""

import numpy as np
import pytest
from conical_lp_solver.data import ProblemFile, write_document
from conical_lp_solver.feasibility import FeasibilityProblem
from conical_lp_solver.linalg import ToleranceConfig
from conical_lp_solver.lp_solver import LpProblem
from conical_lp_solver.models import Base
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

# The unit square as G x <= v.
BOX_G = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
BOX_V = [1.0, 1.0, 0.0, 0.0]


@pytest.fixture
def tol() -> ToleranceConfig:
    return ToleranceConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def segment_problem() -> FeasibilityProblem:
    # 1 <= x <= 2
    return FeasibilityProblem.from_values([[1.0], [-1.0]], [2.0, -1.0])


@pytest.fixture
def empty_segment_problem() -> FeasibilityProblem:
    # x <= 0 and x >= 1
    return FeasibilityProblem.from_values([[1.0], [-1.0]], [0.0, -1.0])


@pytest.fixture
def interval_lp() -> LpProblem:
    # maximise x subject to 1 <= x <= 2
    return LpProblem.from_values([[1.0], [-1.0]], [2.0, -1.0], [1.0])


@pytest.fixture
def box_lp() -> LpProblem:
    # maximise x1 + x2 over the unit square
    return LpProblem.from_values(BOX_G, BOX_V, [1.0, 1.0])


@pytest.fixture
def edge_lp() -> LpProblem:
    # maximise x1 over the unit square: the optimal face is an edge
    return LpProblem.from_values(BOX_G, BOX_V, [1.0, 0.0])


@pytest.fixture
def interval_file(tmp_path) -> ProblemFile:
    problem = ProblemFile(name="interval", G=[[1.0], [-1.0]], v=[2.0, -1.0], f=[1.0])
    write_document(tmp_path / "interval.json", problem)
    return problem


@pytest.fixture
def db_session():
    engine = create_engine("sqlite:///:memory:")
    Base.metadata.create_all(engine)
    TestingSessionLocal = sessionmaker(bind=engine)
    session = TestingSessionLocal()
    yield session
    session.close()
