"""ORM tables for persisted experiment runs, decomposition trials and attacks."""

from datetime import datetime

from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Index, Integer, String, Text
from sqlalchemy.orm import relationship
from src.database.session import Base


class ExperimentRun(Base):
    """One invocation of the short-decomposition experiment."""

    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(String, unique=True, index=True, nullable=False)
    seed = Column(Integer, nullable=True)
    mode = Column(String, nullable=False)  # consecutive | reordered
    digits = Column(Integer, nullable=True)  # requested log10|delta|, None for explicit lists
    trials_per_delta = Column(Integer, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)

    rows = relationship("ExperimentRow", back_populates="run", cascade="all, delete-orphan")
    trials = relationship("ExperimentTrial", back_populates="run", cascade="all, delete-orphan")


class ExperimentRow(Base):
    """Summary per discriminant, the shape of one printed table row."""

    __tablename__ = "experiment_rows"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(String, ForeignKey("experiment_runs.run_id"), index=True)
    delta = Column(String, nullable=False)  # exceeds 64-bit integers
    log10_delta = Column(Float)
    generator_count = Column(Integer)
    max_coefficient = Column(Integer, nullable=True)
    exponent_bound = Column(Float)
    mean_max = Column(Float, nullable=True)
    raw_max_coefficient = Column(Integer, nullable=True)
    class_number = Column(String, nullable=True)
    divisors = Column(Text, nullable=True)  # JSON list
    primes = Column(Text, nullable=True)  # JSON list
    seconds = Column(Float)
    error = Column(Text, nullable=True)

    run = relationship("ExperimentRun", back_populates="rows")


class ExperimentTrial(Base):
    """One random class decomposed over the generating primes."""

    __tablename__ = "experiment_trials"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(String, ForeignKey("experiment_runs.run_id"), index=True)
    delta = Column(String, nullable=False)
    coordinates = Column(Text, nullable=False)  # JSON list y
    exponents = Column(Text, nullable=False)  # JSON list e
    max_abs = Column(Integer, nullable=False)
    raw_max_abs = Column(Integer, nullable=True)

    run = relationship("ExperimentRun", back_populates="trials")

    __table_args__ = (
        Index('idx_trial_run_delta', 'run_id', 'delta'),
    )


class AttackTranscript(Base):
    """Outcome of one end-to-end key recovery."""

    __tablename__ = "attack_transcripts"

    id = Column(Integer, primary_key=True, index=True)
    p = Column(String, nullable=False)
    ells = Column(Text, nullable=False)  # JSON list
    seed = Column(Integer, nullable=True)
    solver = Column(String, index=True, nullable=False)
    public_A = Column(String, nullable=False)
    recovered = Column(Boolean, nullable=False)
    first_attempt = Column(Boolean, nullable=True)
    attempts = Column(Integer, nullable=True)
    queries = Column(Integer, nullable=True)
    peak_pool = Column(Integer, nullable=True)
    shift = Column(Text, nullable=True)  # JSON list
    exponents = Column(Text, nullable=True)  # JSON list
    error = Column(Text, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)
