# api/main.py

import logging
import os
from contextlib import asynccontextmanager

from dotenv import load_dotenv
from fastapi import FastAPI, status

from core import database

from .routers import analysis, circuits, rom_results_router

load_dotenv()

# --- Basic Logging Configuration ---
LOG_LEVEL_FROM_ENV = os.getenv("LOG_LEVEL", "INFO").upper()
logging.basicConfig(
    level=LOG_LEVEL_FROM_ENV,
    format="%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(funcName)s:%(lineno)d - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger(__name__)
logger.info(f"Logging level set to: {LOG_LEVEL_FROM_ENV}")

DESCRIPTION = """
Qudit Pauli-based computation toolkit over HTTP.

* **Circuits**: parse, gadgetize and compile Clifford+U_v circuits under `/circuits`
* **Analysis**: robustness of magic, stabilizer Renyi entropies, bounds and sample plans under `/analysis`
* **RoM Results**: the cache of solved robustness LPs under `/rom-results`
"""


@asynccontextmanager
async def lifespan(app_instance: FastAPI):
    logger.info("Application startup: checking result cache tables...")
    try:
        database.create_db_and_tables()
    except Exception as e:
        logger.error(f"Error during result cache table creation: {e}", exc_info=True)
    yield
    logger.info("Application shutting down.")


app = FastAPI(
    title="Qudit PBC Toolkit API",
    description=DESCRIPTION,
    version="0.1.0",
    openapi_tags=[
        {"name": "Circuits", "description": "Circuit parsing, gadgetization and compilation."},
        {"name": "Analysis", "description": "Magic monotones and sampling-cost estimates."},
        {"name": "RoM Results", "description": "Cached robustness-of-magic results."},
        {"name": "Health", "description": "Endpoints for checking API status."},
        {"name": "Root", "description": "Basic API information."},
    ],
    lifespan=lifespan,
)

app.include_router(circuits.router)
app.include_router(analysis.router)
app.include_router(rom_results_router.router)


@app.get("/", tags=["Root"], summary="API Welcome Message")
async def read_root():
    return {
        "message": "Qudit PBC toolkit API",
        "documentation": app.docs_url,
        "alternative_documentation": app.redoc_url,
    }


@app.get("/health", status_code=status.HTTP_200_OK, tags=["Health"], summary="Health Check")
async def health_check():
    return {"status": "healthy"}
