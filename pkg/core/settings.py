# core/settings.py

import logging
import os
import zlib

import numpy as np
from dotenv import load_dotenv

from . import constants
from .exceptions import MissingConfigurationError

logger = logging.getLogger(__name__)

# Load environment variables from a local .env file if present.
load_dotenv()

ORACLE_LIMIT_ENV = "QPBC_ORACLE_LIMIT"
ENUMERATION_LIMIT_ENV = "QPBC_ENUMERATION_LIMIT"
LP_SOLVER_ENV = "QPBC_LP_SOLVER"
DATABASE_URL_ENV = "QPBC_DATABASE_URL"
CACHE_DIR_ENV = "QPBC_CACHE_DIR"

DEFAULT_DATABASE_URL = "sqlite:///./qpbc_results.db"
DEFAULT_CACHE_DIR = ".qpbc_cache"
DEFAULT_LP_SOLVER = "highs"
SUPPORTED_LP_SOLVERS = ("highs", "simplex")


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise MissingConfigurationError(
            name, message=f"Environment variable must be an integer, got '{raw}'."
        ) from e
    if value <= 0:
        raise MissingConfigurationError(
            name, message=f"Environment variable must be positive, got {value}."
        )
    return value


def oracle_limit() -> int:
    """Largest dense dimension p^n the statevector oracle will allocate."""
    return _int_from_env(ORACLE_LIMIT_ENV, constants.DEFAULT_ORACLE_LIMIT)


def enumeration_limit() -> int:
    return _int_from_env(ENUMERATION_LIMIT_ENV, constants.DEFAULT_ENUMERATION_LIMIT)


def lp_solver() -> str:
    solver = os.getenv(LP_SOLVER_ENV, DEFAULT_LP_SOLVER).strip().lower()
    if solver not in SUPPORTED_LP_SOLVERS:
        raise MissingConfigurationError(
            LP_SOLVER_ENV,
            message=f"Unknown LP solver '{solver}'; expected one of {SUPPORTED_LP_SOLVERS}.",
        )
    return solver


def database_url() -> str:
    return os.getenv(DATABASE_URL_ENV, DEFAULT_DATABASE_URL)


def cache_dir() -> str:
    return os.getenv(CACHE_DIR_ENV, DEFAULT_CACHE_DIR)


def stage_rng(seed: int, label: str) -> np.random.Generator:
    """Independent random stream for one pipeline stage, fixed by (seed, label)."""
    return np.random.default_rng([seed, zlib.crc32(label.encode())])
