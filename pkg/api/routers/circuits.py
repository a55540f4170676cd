# api/routers/circuits.py

import logging

from fastapi import APIRouter, File, HTTPException, Query, UploadFile, status

from core import constants, settings
from core.backends import DenseBackend
from core.circuit import CircuitIR, GadgetizedCircuit, gadgetize, parse
from core.compiler import Transcript, run_session
from core.models import CircuitTextRequest, CompileRequest

from ..errors import http_error

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/circuits", tags=["Circuits"])

MAX_UPLOAD_BYTES = 1_000_000


def _compile(text: str, seed: int, validate: bool) -> Transcript:
    gc = gadgetize(parse(text))
    backend = DenseBackend(gc.p, gc.magic_params)
    rng = settings.stage_rng(seed, constants.SEED_LABEL_COMPILE)
    return run_session(gc, backend, rng, validate=validate)


@router.post("/parse", response_model=CircuitIR, summary="Validate a circuit and return its IR")
async def parse_circuit_endpoint(request: CircuitTextRequest):
    logger.info(f"Received circuit of {len(request.text)} characters for parsing")
    try:
        return parse(request.text)
    except Exception as e:
        raise http_error(e, "/circuits/parse") from e


@router.post("/gadgetize", response_model=GadgetizedCircuit, summary="Replace U_v gates by injection gadgets")
async def gadgetize_circuit_endpoint(request: CircuitTextRequest):
    try:
        return gadgetize(parse(request.text))
    except Exception as e:
        raise http_error(e, "/circuits/gadgetize") from e


@router.post("/compile", response_model=Transcript, summary="Compile a circuit to a PBC transcript")
def compile_circuit_endpoint(request: CompileRequest):
    logger.info(f"Compiling circuit with seed={request.seed}, validate={request.validate_session}")
    try:
        transcript = _compile(request.text, request.seed, request.validate_session)
        logger.info(f"Compilation finished: case counts {transcript.case_counts()}")
        return transcript
    except Exception as e:
        raise http_error(e, "/circuits/compile") from e


@router.post(
    "/compile-upload",
    response_model=Transcript,
    summary="Compile an uploaded circuit text file",
)
async def compile_upload_endpoint(
    file: UploadFile = File(..., description="Circuit in the text format"),
    seed: int = Query(0, ge=0),
    validate_session: bool = Query(False),
):
    logger.info(f"Received upload for /compile-upload. Filename: {file.filename}")
    try:
        contents = await file.read()
    finally:
        await file.close()
    if len(contents) > MAX_UPLOAD_BYTES:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"Upload exceeds {MAX_UPLOAD_BYTES} bytes.",
        )
    try:
        text = contents.decode("utf-8")
    except UnicodeDecodeError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST, detail="Circuit file must be UTF-8 text."
        ) from e
    try:
        return _compile(text, seed, validate_session)
    except Exception as e:
        raise http_error(e, "/circuits/compile-upload") from e
