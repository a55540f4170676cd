# core/crud_rom_results.py

import json
import logging
from typing import Optional

import numpy as np
from sqlalchemy.orm import Session

from .magic import MagicParams
from .models import RomResultCreate, RomResultDB

logger = logging.getLogger(__name__)


def get_rom_result(db: Session, result_id: int) -> Optional[RomResultDB]:
    logger.debug(f"Attempting to retrieve RoM result with id: {result_id}")
    result = db.query(RomResultDB).filter(RomResultDB.id == result_id).first()
    if result:
        logger.debug(f"Found RoM result with id: {result_id}")
    else:
        logger.debug(f"No RoM result found with id: {result_id}")
    return result


def find_rom_result(
    db: Session, p: int, copies: int, params: MagicParams, solver: str
) -> Optional[RomResultDB]:
    """Looks up a cached result by its (p, copies, z', gamma', eps', solver) key."""
    z, gamma, eps = params.as_tuple()
    logger.debug(f"Looking up cached RoM for p={p}, copies={copies}, params={params.as_tuple()}, solver={solver}")
    return (
        db.query(RomResultDB)
        .filter(
            RomResultDB.p == p,
            RomResultDB.copies == copies,
            RomResultDB.z == z,
            RomResultDB.gamma == gamma,
            RomResultDB.eps == eps,
            RomResultDB.solver == solver,
        )
        .first()
    )


def get_all_rom_results(
    db: Session, skip: int = 0, limit: int = 100, p: Optional[int] = None
) -> list[RomResultDB]:
    logger.debug(f"Attempting to retrieve RoM results with skip: {skip}, limit: {limit}, p: {p}")
    query = db.query(RomResultDB)
    if p is not None:
        query = query.filter(RomResultDB.p == p)
    results = query.order_by(RomResultDB.created_at.desc(), RomResultDB.id.desc()).offset(skip).limit(limit).all()
    logger.debug(f"Retrieved {len(results)} RoM results.")
    return results


def create_rom_result(db: Session, result: RomResultCreate) -> RomResultDB:
    logger.info(
        f"Attempting to store RoM result: p={result.p}, copies={result.copies}, "
        f"value={result.value:.6f}, support={len(result.coefficients)}"
    )
    db_result = RomResultDB(
        p=result.p,
        copies=result.copies,
        z=result.z,
        gamma=result.gamma,
        eps=result.eps,
        solver=result.solver,
        value=result.value,
        residual=result.residual,
        state_count=result.state_count,
        coefficients=json.dumps({str(k): v for k, v in sorted(result.coefficients.items())}),
    )
    try:
        db.add(db_result)
        db.commit()
        db.refresh(db_result)
        logger.info(f"Successfully stored RoM result with ID: {db_result.id}")
        return db_result
    except Exception as e:
        db.rollback()
        logger.error(f"Error storing RoM result in DB: {str(e)}", exc_info=True)
        raise


def delete_rom_result(db: Session, result_id: int) -> Optional[RomResultDB]:
    """Returns the deleted row, or None if it did not exist."""
    logger.info(f"Attempting to delete RoM result with ID: {result_id}")
    db_result = get_rom_result(db, result_id)
    if not db_result:
        logger.warning(f"No RoM result found with ID {result_id} for deletion.")
        return None
    try:
        db.delete(db_result)
        db.commit()
        logger.info(f"Successfully deleted RoM result with ID: {result_id}")
        return db_result
    except Exception as e:
        db.rollback()
        logger.error(f"Error deleting RoM result ID {result_id} from DB: {str(e)}", exc_info=True)
        raise


def count_rom_results(db: Session, p: Optional[int] = None) -> int:
    query = db.query(RomResultDB)
    if p is not None:
        query = query.filter(RomResultDB.p == p)
    count = query.count()
    logger.debug(f"Total RoM results found: {count}")
    return count


# --- Conversions ---


def sparse_coefficients(coefficients: np.ndarray, threshold: float) -> dict[int, float]:
    return {int(j): float(coefficients[j]) for j in np.flatnonzero(np.abs(coefficients) > threshold)}


def dense_coefficients(db_result: RomResultDB) -> np.ndarray:
    values = np.zeros(db_result.state_count)
    for key, value in json.loads(db_result.coefficients).items():
        values[int(key)] = value
    return values
