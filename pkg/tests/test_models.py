"""
Contains tests for the benchmark results database model.
"""

from conical_lp_solver.models import BenchResultModel, create_session


def _row(**overrides) -> BenchResultModel:
    values = {
        "suite": "suite",
        "name": "lp-n5-m2-s0",
        "status_enum": "optimal",
        "status_evo": "optimal",
        "h_enum": 1.5,
        "h_evo": 1.5,
        "agree": True,
        "rays_enum": 4,
        "rays_evo": 2,
        "rays_walked_evo": 3,
        "steps": 2,
        "wall_ms_enum": 1.0,
        "wall_ms_evo": 0.5,
    }
    return BenchResultModel(**(values | overrides))


def test_create_session_creates_tables() -> None:
    session = create_session("sqlite:///:memory:")
    session.add(_row())
    session.commit()

    stored = session.query(BenchResultModel).one()
    assert stored.id is not None
    assert stored.date_created is not None
    assert stored.h_oracle is None
    assert stored.error is None
    session.close()


def test_bench_result_nullable_fields(db_session) -> None:
    db_session.add(
        _row(status_enum="error", h_enum=None, h_evo=None, agree=None, error="boom")
    )
    db_session.commit()

    stored = db_session.query(BenchResultModel).filter_by(status_enum="error").one()
    assert stored.agree is None
    assert stored.error == "boom"
