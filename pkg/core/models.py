# core/models.py

from datetime import datetime
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator
from sqlalchemy import Column, DateTime, Float, Integer, String, Text, UniqueConstraint
from sqlalchemy.sql import func

from .database import Base
from .magic import MagicParams
from .pauli import PauliObservable


# --- SQLAlchemy Model for cached robustness-of-magic results ---
class RomResultDB(Base):
    __tablename__ = "rom_results"
    __table_args__ = (
        UniqueConstraint("p", "copies", "z", "gamma", "eps", "solver", name="uq_rom_result_key"),
    )

    id: int = Column(Integer, primary_key=True, index=True, autoincrement=True)

    # Key: |T_v><T_v|^(x)copies with U_v parameters (z', gamma', eps')
    p: int = Column(Integer, nullable=False, index=True)
    copies: int = Column(Integer, nullable=False)
    z: int = Column(Integer, nullable=False)
    gamma: int = Column(Integer, nullable=False)
    eps: int = Column(Integer, nullable=False)
    solver: str = Column(String(32), nullable=False)

    value: float = Column(Float, nullable=False)
    residual: float = Column(Float, nullable=False)
    state_count: int = Column(Integer, nullable=False)
    # JSON object {state index: coefficient} over the nonzero entries
    coefficients: str = Column(Text, nullable=False)

    created_at: datetime = Column(DateTime(timezone=True), server_default=func.now())
    updated_at: datetime = Column(
        DateTime(timezone=True), server_default=func.now(), onupdate=func.now()
    )


# --- Pydantic Schemas for CRUD Operations on RoM results ---


class RomResultCreate(BaseModel):
    p: int = Field(..., ge=3)
    copies: int = Field(..., ge=1)
    z: int = Field(..., ge=0)
    gamma: int = Field(..., ge=1)
    eps: int = Field(..., ge=0)
    solver: str = Field(..., max_length=32)
    value: float = Field(..., ge=1.0 - 1e-6)
    residual: float = Field(..., ge=0)
    state_count: int = Field(..., ge=1)
    coefficients: dict[int, float]


class RomResultResponse(BaseModel):
    id: int
    p: int
    copies: int
    z: int
    gamma: int
    eps: int
    solver: str
    value: float
    residual: float
    state_count: int
    created_at: datetime
    updated_at: datetime

    model_config = {"from_attributes": True}


class RomResultListResponse(BaseModel):
    items: list[RomResultResponse]
    total: int
    skip: Optional[int] = None
    limit: Optional[int] = None


# --- Pydantic Schemas for API Input/Output ---


class CircuitTextRequest(BaseModel):
    """A circuit in the text format."""

    text: str = Field(..., min_length=1)

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "summary": "One qutrit T gate",
                    "value": {"text": "qudits 1 dim 3\nF 0\nUV 0 1 2 0\nMEASURE 0\n"},
                }
            ]
        }
    }


class CompileRequest(CircuitTextRequest):
    seed: int = Field(0, ge=0)
    validate_session: bool = Field(False, description="Run compiler self-checks after every step")


class RomRequest(BaseModel):
    p: int = Field(..., ge=3)
    copies: int = Field(1, ge=1)
    params: Optional[tuple[int, int, int]] = Field(None, description="(z', gamma', eps'); defaults per p")
    solver: Optional[Literal["highs", "simplex"]] = None
    use_cache: bool = True


class RomResponse(BaseModel):
    p: int
    copies: int
    params: tuple[int, int, int]
    rom: float
    residual: float
    solver: str
    support_size: int
    cached: bool


class EntropyRequest(BaseModel):
    p: int = Field(..., ge=3)
    alpha: float = Field(0.5, ge=0)
    copies: int = Field(1, ge=1)
    params: Optional[tuple[int, int, int]] = None


class EntropyResponse(BaseModel):
    p: int
    alpha: float
    copies: int
    params: tuple[int, int, int]
    entropy: float


class BoundsRequest(BaseModel):
    p: int = Field(..., ge=3)
    copies: int = Field(1, ge=1)
    params: Optional[tuple[int, int, int]] = None
    accuracy: float = Field(0.05, gt=0)
    failure_probability: float = Field(0.05, gt=0, lt=1)


class PlanSamplesRequest(BaseModel):
    accuracy: float = Field(..., gt=0)
    failure_probability: float = Field(..., gt=0, lt=1)
    l1: float = Field(..., ge=1.0 - 1e-9)
    p: int = Field(..., ge=3)
    conservative: bool = False


class PlanSamplesResponse(BaseModel):
    samples: int
    half_width_scale: float = Field(..., description="Half-range of the estimator values used by the bound")


class ProgramDocument(BaseModel):
    """A standard PBC: observables on t magic qudits holding |T_v> states."""

    p: int
    t: int = Field(..., ge=1)
    program: list[PauliObservable]
    magic_params: Optional[list[MagicParams]] = None

    @model_validator(mode="after")
    def _check_shapes(self):
        for M in self.program:
            if M.p != self.p or M.n != self.t:
                raise ValueError(f"observable {M.label()} is not on {self.t} qudits of dimension {self.p}")
        if self.magic_params is not None and len(self.magic_params) != self.t:
            raise ValueError(f"expected {self.t} magic parameter sets, got {len(self.magic_params)}")
        return self
