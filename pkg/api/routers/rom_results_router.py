# api/routers/rom_results_router.py

import logging
from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Query, status
from sqlalchemy.orm import Session

from core import database
from core.crud_rom_results import (
    count_rom_results,
    delete_rom_result,
    get_all_rom_results,
    get_rom_result,
)
from core.models import RomResultListResponse, RomResultResponse

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/rom-results", tags=["RoM Results"])


@router.get("/", response_model=RomResultListResponse, summary="List cached RoM results")
async def read_all_rom_results_endpoint(
    skip: int = Query(0, ge=0, description="Number of records to skip for pagination"),
    limit: int = Query(100, ge=0, le=1000, description="Maximum number of records to return"),
    p: Optional[int] = Query(None, ge=3, description="Only results for this qudit dimension"),
    db: Session = Depends(database.get_db),
):
    logger.info(f"Received request to list RoM results with skip={skip}, limit={limit}, p={p}")
    try:
        results = get_all_rom_results(db, skip=skip, limit=limit, p=p)
        total = count_rom_results(db, p=p)
        return RomResultListResponse(items=results, total=total, skip=skip, limit=limit)
    except Exception as e:
        logger.error(f"Error retrieving RoM results: {str(e)}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Could not retrieve RoM results.",
        ) from e


@router.get("/{result_id}", response_model=RomResultResponse, summary="Get a cached RoM result by ID")
async def read_rom_result_endpoint(result_id: int, db: Session = Depends(database.get_db)):
    result = get_rom_result(db, result_id)
    if result is None:
        logger.warning(f"RoM result with ID {result_id} not found.")
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"RoM result with ID {result_id} not found",
        )
    return result


@router.delete("/{result_id}", response_model=RomResultResponse, summary="Delete a cached RoM result")
async def delete_rom_result_endpoint(result_id: int, db: Session = Depends(database.get_db)):
    logger.info(f"Received request to delete RoM result with ID: {result_id}")
    existing = get_rom_result(db, result_id)
    if existing is None:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"RoM result with ID {result_id} not found",
        )
    response = RomResultResponse.model_validate(existing)
    try:
        delete_rom_result(db, result_id)
    except Exception as e:
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Could not delete the RoM result.",
        ) from e
    logger.info(f"Deleted RoM result with ID: {result_id}")
    return response
