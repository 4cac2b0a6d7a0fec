"""
Contains the database model for stored benchmark results.
"""

import datetime

from sqlalchemy import Boolean, Column, DateTime, Float, Integer, String, create_engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

Base = declarative_base()


class BenchResultModel(Base):
    """
    Represents one benchmarked instance in the database.

    Attributes:
        id: The primary key of the row.
        date_created: The date and time when the row was stored.
        suite: The suite directory the instance came from.
        name: The instance name.
        status_enum: The enumerative solver status.
        status_evo: The evolutive solver status.
        h_enum: The enumerative optimum (or null).
        h_evo: The evolutive optimum (or null).
        h_oracle: The oracle optimum (or null when above the oracle caps).
        agree: Whether every available answer agrees.
        rays_enum: Rays enumerated by the enumerative solver.
        rays_evo: Positive rays reached by the evolutive solver.
        rays_walked_evo: Rays the evolutive cursors walked.
        steps: Evolutive steps.
        wall_ms_enum: Enumerative wall time in milliseconds.
        wall_ms_evo: Evolutive wall time in milliseconds.
        error: The failure message, if any.
    """

    __tablename__ = "bench_results"

    id = Column(Integer, primary_key=True)
    date_created = Column(DateTime, default=datetime.datetime.now)
    suite = Column(String, nullable=False)
    name = Column(String, nullable=False)
    status_enum = Column(String, nullable=False)
    status_evo = Column(String, nullable=False)
    h_enum = Column(Float, nullable=True)
    h_evo = Column(Float, nullable=True)
    h_oracle = Column(Float, nullable=True)
    agree = Column(Boolean, nullable=True)
    rays_enum = Column(Integer, nullable=False)
    rays_evo = Column(Integer, nullable=False)
    rays_walked_evo = Column(Integer, nullable=False)
    steps = Column(Integer, nullable=False)
    wall_ms_enum = Column(Float, nullable=False)
    wall_ms_evo = Column(Float, nullable=False)
    error = Column(String, nullable=True)


def create_session(url: str = "sqlite:///bench_results.db") -> Session:
    """
    Connects to the database, creating the tables if needed.

    Args:
        url: The SQLAlchemy database URL.

    Returns:
        A new session bound to the database.
    """
    engine = create_engine(url)
    Base.metadata.create_all(engine)
    return sessionmaker(bind=engine)()
