# tests/conftest.py

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from core import settings
from core.database import Base


@pytest.fixture(autouse=True)
def stabilizer_cache_dir(tmp_path, monkeypatch):
    """Keeps the npz stabilizer cache out of the working directory."""
    cache = tmp_path / "cache"
    monkeypatch.setenv(settings.CACHE_DIR_ENV, str(cache))
    return cache


@pytest.fixture
def db_engine():
    engine = create_engine(
        "sqlite://",
        connect_args={"check_same_thread": False},
        poolclass=StaticPool,
    )
    Base.metadata.create_all(bind=engine)
    yield engine
    Base.metadata.drop_all(bind=engine)
    engine.dispose()


@pytest.fixture
def db_session(db_engine):
    TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=db_engine)
    db = TestingSessionLocal()
    try:
        yield db
    finally:
        db.close()

