# core/database.py

import logging

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from . import settings

logger = logging.getLogger(__name__)

# --- Database URL Configuration ---
# Robustness-of-magic results are cached in a local SQLite file by default.
# QPBC_DATABASE_URL points the cache at any SQLAlchemy URL instead.
DATABASE_URL = settings.database_url()

engine_args = {}
if DATABASE_URL.startswith("sqlite"):
    # FastAPI serves requests from a thread pool
    engine_args["connect_args"] = {"check_same_thread": False}
elif DATABASE_URL.startswith("postgresql"):
    engine_args["pool_pre_ping"] = True

logger.debug(
    f"Result cache URL configured: {DATABASE_URL.split('@')[1] if '@' in DATABASE_URL else DATABASE_URL}"
)

engine = create_engine(DATABASE_URL, **engine_args)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


# --- Dependency for FastAPI to get DB session ---
def get_db():
    """Yields a session per request and always closes it afterwards."""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def create_db_and_tables(bind=None):
    """Creates the result cache tables if they do not exist yet."""
    bind = bind if bind is not None else engine
    logger.info(
        f"Creating result cache tables for engine: {bind.url.render_as_string(hide_password=True)}"
    )
    try:
        Base.metadata.create_all(bind=bind)
        logger.info("Result cache tables checked/created.")
    except Exception as e:
        logger.error(f"Error creating result cache tables: {str(e)}", exc_info=True)
