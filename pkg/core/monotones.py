# core/monotones.py
"""Magic monotones: robustness of magic, stabilizer norm and stabilizer Renyi entropies."""

import itertools
import logging
import math
from functools import lru_cache
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse

from . import constants
from .exceptions import InvalidInputDataError, NormalizationError, NumericalFailure, ShapeError
from .lp import minimize_l1
from .magic import MagicParams, magic_tensor_power
from .pauli import PauliObservable, apply_pauli_to_vector, check_dimension, dense_matrix
from .stabilizer_states import StabilizerBasis, load_stabilizer_basis, pauli_index

logger = logging.getLogger(__name__)


class RomResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: int
    n: int
    value: float
    coefficients: np.ndarray
    residual: float
    solver: str

    def support(self) -> np.ndarray:
        return np.flatnonzero(np.abs(self.coefficients) > constants.COEFFICIENT_PRUNE_THRESHOLD)


class BoundReport(BaseModel):
    p: int
    copies: int
    magic_params: MagicParams
    rom: float
    rom_root: float = Field(..., description="R^(2/copies)")
    st_norm: float
    rom_upper_exponent: float
    renyi_lower_exponent: float
    planned_samples: Optional[int] = Field(None, description="Hoeffding samples for one virtual block at the requested accuracy")


# --- Pauli expectations ---


def _infer_size(dim: int, p: int) -> int:
    n = round(math.log(dim, p)) if dim > 1 else 0
    if p**n != dim:
        raise ShapeError(f"Dimension {dim} is not a power of {p}.")
    return n


def pauli_expectations(state: np.ndarray, p: int) -> np.ndarray:
    """Tr(P rho) (or <psi|P|psi>) for every phase-one Pauli in pauli_index order."""
    state = np.asarray(state, dtype=complex)
    n = _infer_size(state.shape[0], p)
    check_dimension(p, n)
    values = np.empty(p ** (2 * n), dtype=complex)
    for i, entries in enumerate(itertools.product(range(p), repeat=2 * n)):
        P = PauliObservable._make(p, 0, entries[:n], entries[n:])
        if state.ndim == 1:
            values[i] = np.vdot(state, apply_pauli_to_vector(P, state))
        else:
            values[i] = np.einsum("ij,ji->", dense_matrix(P), state)
    return values


def _as_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj()) if state.ndim == 1 else state


# --- Robustness of magic ---


@lru_cache(maxsize=None)
def _constraint_layout(p: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row position of each Pauli index (-1 when it is not a representative) and the representatives.

    The identity takes row 0; each pair {P, P^-1} contributes a real and an
    imaginary row through its smaller index.
    """
    total = p ** (2 * n)
    digits = np.array(list(itertools.product(range(p), repeat=2 * n)), dtype=np.int64).reshape(total, 2 * n)
    inverse = pauli_index((-digits[:, :n]) % p, (-digits[:, n:]) % p, p)
    indices = np.arange(total)
    representatives = indices[(indices > 0) & (indices < inverse)]
    position = np.full(total, -1, dtype=np.int64)
    position[representatives] = np.arange(representatives.size)
    return position, representatives


def constraint_matrix(basis: StabilizerBasis) -> sparse.csc_matrix:
    p, n = basis.p, basis.n
    position, representatives = _constraint_layout(p, n)
    rows_total = 1 + 2 * representatives.size
    cols = np.repeat(np.arange(basis.count), basis.index.shape[1])
    index = basis.index.reshape(-1)
    angle = 2 * np.pi * basis.exponent.reshape(-1) / p
    identity = index == 0
    rep = position[index]
    keep = rep >= 0
    rows = np.concatenate([np.zeros(identity.sum(), dtype=np.int64), 1 + 2 * rep[keep], 2 + 2 * rep[keep]])
    columns = np.concatenate([cols[identity], cols[keep], cols[keep]])
    data = np.concatenate([np.ones(identity.sum()), np.cos(angle[keep]), np.sin(angle[keep])])
    return sparse.csc_matrix((data, (rows, columns)), shape=(rows_total, basis.count))


def constraint_vector(rho: np.ndarray, p: int, n: int) -> np.ndarray:
    expectations = pauli_expectations(rho, p)
    _, representatives = _constraint_layout(p, n)
    b = np.empty(1 + 2 * representatives.size)
    b[0] = expectations[0].real
    b[1::2] = expectations[representatives].real
    b[2::2] = expectations[representatives].imag
    return b


def _check_density(rho: np.ndarray) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"Density matrix must be square, got shape {rho.shape}.")
    if not np.allclose(rho, rho.conj().T, atol=constants.EQUALITY_TOLERANCE):
        raise InvalidInputDataError("rho", "matrix", "density matrix must be Hermitian")
    trace = np.trace(rho).real
    if abs(trace - 1) > constants.EQUALITY_TOLERANCE:
        raise NormalizationError(trace)


def rom(
    rho: np.ndarray,
    p: int,
    basis: Optional[StabilizerBasis] = None,
    solver: Optional[str] = None,
) -> RomResult:
    """Robustness of magic min ||c||_1 over rho = sum_j c_j sigma_j."""
    rho = _as_density(rho)
    _check_density(rho)
    n = _infer_size(rho.shape[0], p)
    basis = basis if basis is not None else load_stabilizer_basis(p, n)
    if basis.p != p or basis.n != n:
        raise ShapeError(f"Stabilizer basis is for (p={basis.p}, n={basis.n}), state for (p={p}, n={n}).")
    A = constraint_matrix(basis)
    b = constraint_vector(rho, p, n)
    logger.info(f"Solving RoM LP for p={p}, n={n}: {A.shape[0]} rows, {A.shape[1]} states")
    solution = minimize_l1(A, b, solver)
    if solution.residual > 1e-4:
        raise NumericalFailure(f"RoM reconstruction residual {solution.residual:.3g} is too large")
    return RomResult(
        p=p,
        n=n,
        value=solution.objective,
        coefficients=solution.coefficients,
        residual=solution.residual,
        solver=solution.solver,
    )


def reconstruct_expectations(basis: StabilizerBasis, coefficients: np.ndarray) -> np.ndarray:
    """sum_j c_j Tr(P sigma_j) for every phase-one Pauli P."""
    total = np.zeros(basis.p ** (2 * basis.n), dtype=complex)
    for j in np.flatnonzero(np.abs(coefficients) > constants.COEFFICIENT_PRUNE_THRESHOLD):
        total += coefficients[j] * basis.expectations(j)
    return total


# --- Stabilizer norm and Renyi entropies ---


def st_norm(rho: np.ndarray, p: int) -> float:
    """p^-n sum_P |Tr(P rho)| over phase-one Paulis."""
    rho = np.asarray(rho, dtype=complex)
    n = _infer_size(rho.shape[0], p)
    return float(np.abs(pauli_expectations(rho, p)).sum() / p**n)


def characteristic_distribution(psi: np.ndarray, p: int) -> np.ndarray:
    """Xi_P = p^-n |<psi|P|psi>|^2, entries below the pruning threshold set to zero."""
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > constants.NORM_TOLERANCE * 100:
        raise NormalizationError(norm)
    n = _infer_size(psi.shape[0], p)
    xi = np.abs(pauli_expectations(psi, p)) ** 2 / p**n
    xi[xi < constants.BRANCH_PRUNE_THRESHOLD] = 0.0
    if abs(xi.sum() - 1) > 1e-8:
        raise NumericalFailure(f"characteristic distribution sums to {xi.sum():.12f}")
    return xi


def renyi_entropy(psi: np.ndarray, alpha: float, p: int) -> float:
    """Stabilizer alpha-Renyi entropy (1/(1-alpha)) log_p sum_P Xi_P^alpha - n."""
    if alpha < 0 or alpha == 1:
        raise InvalidInputDataError("alpha", alpha, "alpha must be non-negative and different from 1")
    xi = characteristic_distribution(psi, p)
    n = _infer_size(len(psi), p)
    support = xi[xi > 0]
    total = float(support.size) if alpha == 0 else float(np.sum(support**alpha))
    return math.log(total, p) / (1 - alpha) - n


# --- Bounds ---


def bound_report(
    p: int,
    copies: int,
    params: Optional[MagicParams] = None,
    solver: Optional[str] = None,
    rom_value: Optional[float] = None,
) -> BoundReport:
    """Upper exponent log_p R(T^copies)^(2/copies) and lower exponent M_1/2(T)."""
    if copies < 1:
        raise InvalidInputDataError("copies", copies, "at least one copy is required")
    params = params or MagicParams.default(p)
    state = magic_tensor_power(params, copies)
    rho = np.outer(state, state.conj())
    if rom_value is None:
        rom_value = rom(rho, p, solver=solver).value
    single = magic_tensor_power(params, 1)
    return BoundReport(
        p=p,
        copies=copies,
        magic_params=params,
        rom=rom_value,
        rom_root=rom_value ** (2 / copies),
        st_norm=st_norm(rho, p),
        rom_upper_exponent=(2 / copies) * math.log(rom_value, p),
        renyi_lower_exponent=renyi_entropy(single, 0.5, p),
    )
