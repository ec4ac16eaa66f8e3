"""Shared fixtures: toy parameters, cached precomputations and an in-memory database."""

import random

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from src.config import settings
from src.database.session import Base, init_db
from src.services.isogeny import CsidhParams
from src.services.oracle import precompute


@pytest.fixture(autouse=True)
def restore_settings():
    """Commands mutate the global settings; put them back after each test."""
    saved = settings.model_dump()
    yield
    for key, value in saved.items():
        setattr(settings, key, value)


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(scope="session")
def params419():
    return CsidhParams.from_ells((3, 5, 7))


@pytest.fixture(scope="session")
def params78539():
    return CsidhParams.from_ells((3, 5, 7, 11, 17))


@pytest.fixture(scope="session")
def precomp419(params419):
    return precompute(params419.discriminant, allowed=params419.ells, rng=random.Random(1))


@pytest.fixture(scope="session")
def precomp_forms():
    """Form-mode precomputation on a discriminant with a non-cyclic class group."""
    return precompute(-3299, mode="reordered", rng=random.Random(2))


@pytest.fixture
def db_session():
    engine = create_engine("sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool)
    init_db(engine)
    session = sessionmaker(autocommit=False, autoflush=False, bind=engine)()
    try:
        yield session
    finally:
        session.close()
        Base.metadata.drop_all(bind=engine)
