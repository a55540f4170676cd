# core/stabilizer_states.py
"""Exhaustive enumeration of n-qudit stabilizer states.

A state is described by an affine support {yB + b : y in F_p^k} with B in
reduced row echelon form and b zero on the pivot columns, and a quadratic
phase y^T Q y + l.y. Amplitudes are p^(-k/2) omega^(y^T Q y + l.y). Each
(B, b, Q, l) appears once, so the enumeration is duplicate free by
construction; the total is p^n prod_j (p^j + 1).
"""

import itertools
import logging
import os
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from . import constants, settings
from .exceptions import EnumerationTooLarge
from .field import half
from .linalg import nullspace_mod_p
from .pauli import PauliObservable, roots_of_unity
from .tableau import StabilizerTableau

logger = logging.getLogger(__name__)


def stabilizer_count(p: int, n: int) -> int:
    count = p**n
    for j in range(1, n + 1):
        count *= p**j + 1
    return count


def check_enumeration(p: int, n: int, limit: Optional[int] = None) -> int:
    limit = settings.enumeration_limit() if limit is None else limit
    count = stabilizer_count(p, n)
    if count > limit:
        raise EnumerationTooLarge(count, limit)
    return count


class StabilizerStateDesc(BaseModel):
    """Affine support basis (k x n), offset, symmetric Q (k x k) and linear part l."""

    model_config = ConfigDict(frozen=True)

    p: int
    n: int
    basis: tuple[tuple[int, ...], ...]
    offset: tuple[int, ...]
    quad: tuple[tuple[int, ...], ...]
    linear: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.basis)

    def pivots(self) -> list[int]:
        return [next(c for c, v in enumerate(row) if v) for row in self.basis]

    def vector(self) -> np.ndarray:
        p, n, k = self.p, self.n, self.k
        omega = roots_of_unity(p)
        ys = np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64).reshape(p**k, k)
        B = np.array(self.basis, dtype=np.int64).reshape(k, n)
        Q = np.array(self.quad, dtype=np.int64).reshape(k, k)
        points = (ys @ B + np.array(self.offset, dtype=np.int64)) % p
        phases = (np.einsum("ai,ij,aj->a", ys, Q, ys) + ys @ np.array(self.linear, dtype=np.int64)) % p
        weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
        psi = np.zeros(p**n, dtype=complex)
        psi[points @ weights] = omega[phases] / np.sqrt(p**k)
        return psi

    def generators(self) -> list[PauliObservable]:
        """n independent commuting Paulis with eigenvalue 1 on this state."""
        p, n, k = self.p, self.n, self.k
        B = np.array(self.basis, dtype=np.int64).reshape(k, n)
        b = np.array(self.offset, dtype=np.int64)
        gens = []
        for w in nullspace_mod_p(B, p):
            w = np.asarray(w, dtype=np.int64)
            gens.append(PauliObservable._make(p, -int(w @ b), [0] * n, w.tolist()))
        pivots = self.pivots()
        for i in range(k):
            u = np.zeros(n, dtype=np.int64)
            for j, col in enumerate(pivots):
                u[col] = 2 * self.quad[i][j]
            lam = self.linear[i] - self.quad[i][i] + int(u @ B[i]) - int(u @ b)
            gens.append(PauliObservable._make(p, lam, B[i].tolist(), u.tolist()))
        return gens

    def tableau(self) -> StabilizerTableau:
        return StabilizerTableau(p=self.p, n=self.n, generators=tuple(self.generators()))


def _rref_bases(p: int, n: int, k: int) -> Iterator[np.ndarray]:
    for pivots in itertools.combinations(range(n), k):
        free = [
            (r, c)
            for r, pc in enumerate(pivots)
            for c in range(pc + 1, n)
            if c not in pivots
        ]
        for values in itertools.product(range(p), repeat=len(free)):
            B = np.zeros((k, n), dtype=np.int64)
            for r, pc in enumerate(pivots):
                B[r, pc] = 1
            for (r, c), v in zip(free, values):
                B[r, c] = v
            yield B, pivots


def enumerate_stabilizer_states(p: int, n: int, limit: Optional[int] = None) -> list[StabilizerStateDesc]:
    count = check_enumeration(p, n, limit)
    h = half(p)
    states: list[StabilizerStateDesc] = []
    for k in range(n + 1):
        monomials = [(i, j) for i in range(k) for j in range(i, k)]
        for B, pivots in _rref_bases(p, n, k):
            offset_cols = [c for c in range(n) if c not in pivots]
            basis = tuple(tuple(int(v) for v in row) for row in B)
            for offset_values in itertools.product(range(p), repeat=len(offset_cols)):
                offset = [0] * n
                for c, v in zip(offset_cols, offset_values):
                    offset[c] = v
                for coeffs in itertools.product(range(p), repeat=len(monomials)):
                    Q = [[0] * k for _ in range(k)]
                    for (i, j), c in zip(monomials, coeffs):
                        if i == j:
                            Q[i][i] = c
                        else:
                            Q[i][j] = Q[j][i] = (c * h) % p
                    quad = tuple(tuple(row) for row in Q)
                    for linear in itertools.product(range(p), repeat=k):
                        states.append(
                            StabilizerStateDesc(
                                p=p,
                                n=n,
                                basis=basis,
                                offset=tuple(offset),
                                quad=quad,
                                linear=tuple(linear),
                            )
                        )
    if len(states) != count:
        raise AssertionError(f"enumerated {len(states)} stabilizer states, expected {count}")
    logger.info(f"Enumerated {count} stabilizer states for p={p}, n={n}")
    return states


# --- Pauli expectation data ---


@lru_cache(maxsize=None)
def _power_grid(p: int, n: int) -> np.ndarray:
    return np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64).reshape(p**n, n)


def pauli_index(x, z, p: int) -> np.ndarray:
    """Integer code of phase-one X(x)Z(z), x digits first, most significant first."""
    digits = np.concatenate([np.atleast_2d(x), np.atleast_2d(z)], axis=1)
    weights = p ** np.arange(digits.shape[1] - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def group_expectations(generators: list[PauliObservable]) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the p^n Paulis with nonzero expectation and omega exponents of it."""
    p, n = generators[0].p, generators[0].n
    K = _power_grid(p, n)
    X = np.array([g.x for g in generators], dtype=np.int64)
    Z = np.array([g.z for g in generators], dtype=np.int64)
    lam = np.array([g.lam for g in generators], dtype=np.int64)
    xs = (K @ X) % p
    zs = (K @ Z) % p
    self_terms = (K * (K - 1) // 2) @ np.einsum("ij,ij->i", X, Z)
    cross = np.einsum("ai,ij,aj->a", K, np.triu(Z @ X.T, 1), K)
    mu = (K @ lam + self_terms + cross) % p
    return pauli_index(xs, zs, p), (-mu) % p


class StabilizerBasis(BaseModel):
    """Per-state Pauli expectation data: index[j] and omega exponent[j] for each of p^n elements."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: int
    n: int
    generators: np.ndarray
    index: np.ndarray
    exponent: np.ndarray

    @property
    def count(self) -> int:
        return int(self.index.shape[0])

    @classmethod
    def build(cls, p: int, n: int, limit: Optional[int] = None) -> "StabilizerBasis":
        states = enumerate_stabilizer_states(p, n, limit)
        gens = np.zeros((len(states), n, 2 * n + 1), dtype=np.int64)
        index = np.zeros((len(states), p**n), dtype=np.int64)
        exponent = np.zeros((len(states), p**n), dtype=np.int64)
        for j, state in enumerate(states):
            generators = state.generators()
            for i, g in enumerate(generators):
                gens[j, i] = list(g.x) + list(g.z) + [g.lam]
            index[j], exponent[j] = group_expectations(generators)
        return cls(p=p, n=n, generators=gens, index=index, exponent=exponent)

    def tableau(self, j: int) -> StabilizerTableau:
        n = self.n
        gens = tuple(
            PauliObservable._make(self.p, int(row[2 * n]), row[:n].tolist(), row[n : 2 * n].tolist())
            for row in self.generators[j]
        )
        return StabilizerTableau(p=self.p, n=n, generators=gens)

    def expectations(self, j: int) -> np.ndarray:
        """Dense vector of Tr(P sigma_j) over all p^(2n) phase-one Paulis."""
        values = np.zeros(self.p ** (2 * self.n), dtype=complex)
        values[self.index[j]] = roots_of_unity(self.p)[self.exponent[j]]
        return values


def _cache_path(p: int, n: int) -> str:
    return os.path.join(
        settings.cache_dir(), f"stabilizers_p{p}_n{n}_v{constants.ENUMERATION_FORMAT_VERSION}.npz"
    )


def load_stabilizer_basis(p: int, n: int, use_cache: bool = True, limit: Optional[int] = None) -> StabilizerBasis:
    """Build the basis or read it from the npz cache keyed by (p, n, format version)."""
    check_enumeration(p, n, limit)
    path = _cache_path(p, n)
    if use_cache and os.path.exists(path):
        try:
            with np.load(path) as data:
                if int(data["version"]) == constants.ENUMERATION_FORMAT_VERSION:
                    logger.debug(f"Loaded stabilizer basis from {path}")
                    return StabilizerBasis(
                        p=p,
                        n=n,
                        generators=data["generators"],
                        index=data["index"],
                        exponent=data["exponent"],
                    )
        except (OSError, KeyError, ValueError) as e:
            logger.warning(f"Ignoring unreadable stabilizer cache {path}: {e}")
    basis = StabilizerBasis.build(p, n, limit)
    if use_cache:
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            np.savez_compressed(
                path,
                version=constants.ENUMERATION_FORMAT_VERSION,
                generators=basis.generators,
                index=basis.index,
                exponent=basis.exponent,
            )
        except OSError as e:
            logger.warning(f"Could not write stabilizer cache {path}: {e}")
    return basis
