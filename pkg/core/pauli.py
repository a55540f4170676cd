# core/pauli.py
"""Symbolic generalized Pauli operators omega^lambda X(x) Z(z) with exact phases.

Qudit 0 is the most significant tensor factor in every dense representation.
"""

import itertools
import logging
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import settings
from .exceptions import OracleTooLarge, ShapeError
from .field import FieldElem, half, validate_prime

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def roots_of_unity(order: int) -> np.ndarray:
    """exp(2 pi i k / order) for k in [0, order), computed once per order."""
    roots = np.exp(2j * np.pi * np.arange(order) / order)
    roots.setflags(write=False)
    return roots


class PauliObservable(BaseModel):
    """omega^lam X(x) Z(z) on n qudits of dimension p; all entries reduced mod p."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    p: int = Field(..., description="Odd prime qudit dimension")
    n: int = Field(..., ge=0, description="Number of qudits")
    lam: int = Field(0, alias="lambda", description="Phase exponent of omega")
    x: tuple[int, ...] = Field(..., description="X exponents per qudit")
    z: tuple[int, ...] = Field(..., description="Z exponents per qudit")

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        p = validate_prime(int(data["p"]))
        data["p"] = p
        for key in ("lam", "lambda"):
            if key in data:
                data[key] = int(data[key]) % p
        for key in ("x", "z"):
            if key in data:
                data[key] = tuple(int(v) % p for v in data[key])
        return data

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.x) != self.n or len(self.z) != self.n:
            raise ShapeError(
                f"Pauli vectors must have length n={self.n}; "
                f"got len(x)={len(self.x)}, len(z)={len(self.z)}."
            )
        return self

    # --- construction helpers ---

    @classmethod
    def _make(cls, p: int, lam: int, x: Sequence[int], z: Sequence[int]):
        """Build from values that only need reducing; skips validation."""
        return cls.model_construct(
            p=p,
            n=len(x),
            lam=lam % p,
            x=tuple(int(v) % p for v in x),
            z=tuple(int(v) % p for v in z),
        )

    @classmethod
    def identity(cls, p: int, n: int) -> "PauliObservable":
        return cls(p=p, n=n, lam=0, x=(0,) * n, z=(0,) * n)

    @classmethod
    def single(
        cls, p: int, n: int, wire: int, x: int = 0, z: int = 0, lam: int = 0
    ) -> "PauliObservable":
        """X^x Z^z acting on one wire of an n-qudit register."""
        if not 0 <= wire < n:
            raise IndexError(f"Wire {wire} out of range for {n} qudits.")
        xs = [0] * n
        zs = [0] * n
        xs[wire] = x
        zs[wire] = z
        return cls(p=p, n=n, lam=lam, x=tuple(xs), z=tuple(zs))

    @classmethod
    def from_vector(cls, p: int, vector: Sequence[int], lam: int = 0):
        """Build from a symplectic row (x | z) of length 2n."""
        n = len(vector) // 2
        return cls(p=p, n=n, lam=lam, x=tuple(vector[:n]), z=tuple(vector[n:]))

    # --- inspection ---

    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)

    def support(self) -> list[int]:
        return [i for i in range(self.n) if self.x[i] or self.z[i]]

    def vector(self) -> np.ndarray:
        return np.array(self.x + self.z, dtype=np.int64)

    def with_phase(self, lam: int) -> "PauliObservable":
        return PauliObservable._make(self.p, lam, self.x, self.z)

    def shift_phase(self, delta: int) -> "PauliObservable":
        return PauliObservable._make(self.p, self.lam + delta, self.x, self.z)

    def restrict(self, wires: Sequence[int]) -> "PauliObservable":
        """The factor on the given wires, keeping the global phase."""
        return PauliObservable._make(
            self.p, self.lam, [self.x[w] for w in wires], [self.z[w] for w in wires]
        )

    def embed(self, n_total: int, wires: Sequence[int]) -> "PauliObservable":
        if len(wires) != self.n:
            raise ShapeError(f"Need {self.n} target wires, got {len(wires)}.")
        xs = [0] * n_total
        zs = [0] * n_total
        for i, w in enumerate(wires):
            xs[w] = self.x[i]
            zs[w] = self.z[i]
        return PauliObservable._make(self.p, self.lam, xs, zs)

    def tensor(self, other: "PauliObservable") -> "PauliObservable":
        _check_same_field(self, other)
        return PauliObservable._make(
            self.p, self.lam + other.lam, self.x + other.x, self.z + other.z
        )

    def label(self) -> str:
        """Compact text form such as 'w^1 X1Z2 . Z1'."""
        factors = []
        for xi, zi in zip(self.x, self.z):
            if not xi and not zi:
                factors.append(".")
            else:
                factors.append((f"X{xi}" if xi else "") + (f"Z{zi}" if zi else ""))
        return f"w^{self.lam} " + " ".join(factors)

    def __mul__(self, other: "PauliObservable") -> "PauliObservable":
        return pauli_mul(self, other)

    def __pow__(self, k: int) -> "PauliObservable":
        return pauli_pow(self, k)


class CommutationPhase(BaseModel):
    """phi with M A = omega^phi A M."""

    model_config = ConfigDict(frozen=True)

    phi: int = Field(..., ge=0)
    p: int

    @property
    def commutes(self) -> bool:
        return self.phi == 0


def _check_same_field(P: PauliObservable, Q: PauliObservable) -> None:
    if P.p != Q.p or P.n != Q.n:
        raise ShapeError(
            f"Pauli operands disagree: (p={P.p}, n={P.n}) vs (p={Q.p}, n={Q.n})."
        )


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(u * v for u, v in zip(a, b))


def pauli_mul(P: PauliObservable, Q: PauliObservable) -> PauliObservable:
    """Operator product P Q, moving Z(z_P) past X(x_Q) into the phase."""
    _check_same_field(P, Q)
    p = P.p
    return PauliObservable._make(
        p,
        P.lam + Q.lam + _dot(P.z, Q.x),
        [a + b for a, b in zip(P.x, Q.x)],
        [a + b for a, b in zip(P.z, Q.z)],
    )


def pauli_pow(P: PauliObservable, k: Union[FieldElem, int]) -> PauliObservable:
    """P^k for any integer k; negative powers use P^p = I."""
    k = int(k) % P.p
    p = P.p
    xz = _dot(P.x, P.z)
    lam = k * P.lam + (k * (k - 1) // 2) * xz
    return PauliObservable._make(p, lam, [k * v for v in P.x], [k * v for v in P.z])


def pauli_inverse(P: PauliObservable) -> PauliObservable:
    return pauli_pow(P, P.p - 1)


def symplectic_form(P: PauliObservable, Q: PauliObservable) -> int:
    """z_P.x_Q - x_P.z_Q mod p, the exponent with P Q = omega^phi Q P."""
    return (_dot(P.z, Q.x) - _dot(P.x, Q.z)) % P.p


def commutation_phase(P: PauliObservable, Q: PauliObservable) -> CommutationPhase:
    _check_same_field(P, Q)
    return CommutationPhase(phi=symplectic_form(P, Q), p=P.p)


def _single_qudit_matrix(p: int, x: int, z: int) -> np.ndarray:
    omega = roots_of_unity(p)
    shift = np.roll(np.eye(p, dtype=complex), x, axis=0)
    return shift @ np.diag(omega[(z * np.arange(p)) % p])


def check_dimension(p: int, n: int, limit: Optional[int] = None) -> int:
    """Return p^n, raising OracleTooLarge above the configured limit."""
    limit = settings.oracle_limit() if limit is None else limit
    dim = p**n
    if dim > limit:
        raise OracleTooLarge(dim, limit)
    return dim


def dense_matrix(P: PauliObservable) -> np.ndarray:
    """omega^lam X(x) Z(z) as a p^n x p^n complex matrix."""
    check_dimension(P.p, P.n)
    result = np.ones((1, 1), dtype=complex)
    for xi, zi in zip(P.x, P.z):
        result = np.kron(result, _single_qudit_matrix(P.p, xi, zi))
    return roots_of_unity(P.p)[P.lam] * result


def apply_pauli_to_vector(P: PauliObservable, psi: np.ndarray) -> np.ndarray:
    """omega^lam X(x) Z(z) |psi> without forming the dense matrix."""
    p, n = P.p, P.n
    omega = roots_of_unity(p)
    tensor = np.asarray(psi).reshape((p,) * n) if n else np.asarray(psi)
    if n:
        grids = np.indices((p,) * n)
        exponent = np.zeros((p,) * n, dtype=np.int64)
        for i, zi in enumerate(P.z):
            if zi:
                exponent += zi * grids[i]
        tensor = tensor * omega[exponent % p]
        for i, xi in enumerate(P.x):
            if xi:
                tensor = np.roll(tensor, xi, axis=i)
    return omega[P.lam] * tensor.reshape(-1)


def all_phase_one_paulis(p: int, n: int) -> Iterator[PauliObservable]:
    """Every operator X(x)Z(z) with lam = 0; p^(2n) of them."""
    for entries in itertools.product(range(p), repeat=2 * n):
        yield PauliObservable._make(p, 0, entries[:n], entries[n:])


def random_pauli(
    p: int,
    n: int,
    rng: np.random.Generator,
    allow_identity: bool = True,
    random_phase: bool = True,
) -> PauliObservable:
    while True:
        entries = rng.integers(0, p, size=2 * n)
        if allow_identity or entries.any():
            break
    lam = int(rng.integers(0, p)) if random_phase else 0
    return PauliObservable._make(p, lam, entries[:n].tolist(), entries[n:].tolist())


def product_of_powers(
    generators: Iterable[PauliObservable], powers: Iterable[int], p: int, n: int
) -> PauliObservable:
    """g_0^k_0 g_1^k_1 ... in the given order."""
    result = PauliObservable.identity(p, n)
    for g, k in zip(generators, powers):
        if k % p:
            result = pauli_mul(result, pauli_pow(g, k))
    return result


def scaled_observable(P: PauliObservable, k: int) -> PauliObservable:
    """omega^(k lam) X(kx) Z(kz): P^k with the x.z phase correction removed."""
    p = P.p
    power = pauli_pow(P, k)
    correction = (k * (k - 1) % p) * half(p) * _dot(P.x, P.z)
    return power.shift_phase(-correction)
