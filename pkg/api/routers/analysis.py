# api/routers/analysis.py

import logging
from typing import Optional

from fastapi import APIRouter, Depends
from sqlalchemy.orm import Session

from core import database
from core.hybrid import estimator_range, magic_rom, plan_samples
from core.magic import MagicParams, magic_tensor_power
from core.models import (
    BoundsRequest,
    EntropyRequest,
    EntropyResponse,
    PlanSamplesRequest,
    PlanSamplesResponse,
    RomRequest,
    RomResponse,
)
from core.monotones import BoundReport, bound_report, renyi_entropy

from ..errors import http_error

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/analysis", tags=["Analysis"])


def _params(p: int, values: Optional[tuple[int, int, int]]) -> MagicParams:
    if values is None:
        return MagicParams.default(p)
    z, gamma, eps = values
    return MagicParams(p=p, z=z, gamma=gamma, eps=eps)


# LP solves block for seconds; plain def endpoints run in the threadpool.
@router.post("/rom", response_model=RomResponse, summary="Robustness of magic of |T_v>^(x)copies")
def rom_endpoint(request: RomRequest, db: Session = Depends(database.get_db)):
    logger.info(f"RoM request: {request.model_dump_json(exclude_none=True)}")
    try:
        params = _params(request.p, request.params)
        summary, _ = magic_rom(
            request.p,
            request.copies,
            params,
            request.solver,
            db=db if request.use_cache else None,
        )
        return summary
    except Exception as e:
        raise http_error(e, "/analysis/rom") from e


@router.post("/entropy", response_model=EntropyResponse, summary="Stabilizer Renyi entropy")
def entropy_endpoint(request: EntropyRequest):
    try:
        params = _params(request.p, request.params)
        value = renyi_entropy(magic_tensor_power(params, request.copies), request.alpha, request.p)
        return EntropyResponse(
            p=request.p,
            alpha=request.alpha,
            copies=request.copies,
            params=params.as_tuple(),
            entropy=value,
        )
    except Exception as e:
        raise http_error(e, "/analysis/entropy") from e


@router.post("/bounds", response_model=BoundReport, summary="Sampling-cost exponents and sample plan")
def bounds_endpoint(request: BoundsRequest, db: Session = Depends(database.get_db)):
    try:
        params = _params(request.p, request.params)
        summary, _ = magic_rom(request.p, request.copies, params, db=db)
        report = bound_report(request.p, request.copies, params, rom_value=summary.rom)
        planned = plan_samples(request.accuracy, request.failure_probability, summary.rom, request.p)
        return report.model_copy(update={"planned_samples": planned})
    except Exception as e:
        raise http_error(e, "/analysis/bounds") from e


@router.post("/plan-samples", response_model=PlanSamplesResponse, summary="Hoeffding sample count")
async def plan_samples_endpoint(request: PlanSamplesRequest):
    try:
        samples = plan_samples(
            request.accuracy,
            request.failure_probability,
            request.l1,
            request.p,
            conservative=request.conservative,
        )
        return PlanSamplesResponse(
            samples=samples,
            half_width_scale=estimator_range(request.l1, request.p, request.conservative),
        )
    except Exception as e:
        raise http_error(e, "/analysis/plan-samples") from e
