# core/field.py
"""Arithmetic in the prime field F_p for odd primes p."""

from functools import lru_cache

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import constants
from .exceptions import InverseOfZero, InvalidModulusError, ShapeError


@lru_cache(maxsize=None)
def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def validate_prime(p: int) -> int:
    """Return p if it is a supported odd prime, raise InvalidModulusError otherwise."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise InvalidModulusError(p)
    if not is_odd_prime(p) or p > constants.MAX_SUPPORTED_PRIME:
        raise InvalidModulusError(p)
    return p


def inv_mod(a: int, p: int) -> int:
    """Multiplicative inverse of a modulo p by the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise InverseOfZero(p)
    old_r, r = a, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return old_s % p


def half(p: int) -> int:
    """The inverse of 2 in F_p."""
    return (p + 1) // 2


class FieldElem(BaseModel):
    """An element of F_p stored as its canonical representative in [0, p-1]."""

    model_config = ConfigDict(frozen=True)

    value: int = Field(..., ge=0, description="Canonical representative in [0, p-1]")
    p: int = Field(..., ge=3, description="Odd prime modulus")

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data):
        if isinstance(data, dict) and "value" in data and "p" in data:
            data = dict(data)
            validate_prime(data["p"])
            data["value"] = int(data["value"]) % data["p"]
        return data

    @classmethod
    def of(cls, value: int, p: int) -> "FieldElem":
        return cls(value=value, p=p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise ShapeError(f"Cannot combine F_{self.p} and F_{other.p} elements.")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElem.of(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem.of(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FieldElem.of(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FieldElem.of(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem.of(-self.value, self.p)

    def __truediv__(self, other):
        return self * fp_inv(FieldElem.of(self._coerce(other), self.p))

    def __pow__(self, k: int):
        if k < 0:
            return fp_inv(self) ** (-k)
        return FieldElem.of(pow(self.value, k, self.p), self.p)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0


def fp_inv(a: FieldElem) -> FieldElem:
    """Multiplicative inverse of a nonzero field element."""
    return FieldElem.of(inv_mod(a.value, a.p), a.p)
