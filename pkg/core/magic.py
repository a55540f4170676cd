# core/magic.py
"""The diagonal magic gates U_v, their exponent vectors and the states |T_v> = U_v|+>."""

import logging
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import constants
from .exceptions import NotMagic
from .field import inv_mod, validate_prime
from .pauli import roots_of_unity

logger = logging.getLogger(__name__)


class MagicParams(BaseModel):
    """Parameters (z', gamma', eps') of U_v, reduced mod p; gamma' is nonzero."""

    model_config = ConfigDict(frozen=True)

    p: int
    z: int = Field(..., description="z' parameter")
    gamma: int = Field(..., description="gamma' parameter, nonzero mod p")
    eps: int = Field(..., description="eps' parameter")

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data):
        if isinstance(data, dict) and "p" in data:
            data = dict(data)
            p = validate_prime(int(data["p"]))
            for key in ("z", "gamma", "eps"):
                if key in data:
                    data[key] = int(data[key]) % p
            if data.get("gamma", 1) == 0:
                raise NotMagic(p, (data.get("z"), 0, data.get("eps")))
        return data

    @classmethod
    def default(cls, p: int) -> "MagicParams":
        return cls(
            p=p,
            z=constants.DEFAULT_MAGIC_Z,
            gamma=p - 1,
            eps=constants.DEFAULT_MAGIC_EPS,
        )

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.z, self.gamma, self.eps)


@lru_cache(maxsize=None)
def _exponents(p: int, z: int, gamma: int, eps: int) -> tuple[int, ...]:
    if p == 3:
        return (
            0,
            (6 * z + 2 * gamma + 3 * eps) % 9,
            (6 * z + gamma + 6 * eps) % 9,
        )
    inv12 = inv_mod(12, p)
    return tuple(
        (inv12 * k * (gamma + k * (6 * z + gamma * (2 * k - 3))) + k * eps) % p
        for k in range(p)
    )


def uv_exponent_vector(p: int, z: int, gamma: int, eps: int) -> tuple[int, ...]:
    """Exponents v_k of U_v = sum_k root^{v_k} |k><k|.

    For p = 3 the root is zeta = exp(2 pi i / 9) and exponents are mod 9;
    for p > 3 the root is omega and exponents are mod p. v_0 is always 0.
    """
    params = MagicParams(p=p, z=z, gamma=gamma, eps=eps)
    return _exponents(p, params.z, params.gamma, params.eps)


def uv_diagonal(params: MagicParams) -> np.ndarray:
    p = params.p
    v = np.array(_exponents(p, params.z, params.gamma, params.eps))
    if p == 3:
        return roots_of_unity(9)[v]
    return roots_of_unity(p)[v]


def magic_state_vector(p: int, z: int, gamma: int, eps: int) -> np.ndarray:
    """|T_v> = U_v |+> as a unit vector of length p."""
    params = MagicParams(p=p, z=z, gamma=gamma, eps=eps)
    return uv_diagonal(params) / np.sqrt(p)


def magic_tensor_power(params: MagicParams, copies: int) -> np.ndarray:
    state = np.ones(1, dtype=complex)
    single = magic_state_vector(params.p, *params.as_tuple())
    for _ in range(copies):
        state = np.kron(state, single)
    return state
