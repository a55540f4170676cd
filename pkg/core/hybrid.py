# core/hybrid.py
"""Virtual-qudit hybrid computation.

k of the t magic qudits of a standard PBC are replaced by a quasi-probability
mixture of stabilizer states, |T><T|^(x)k = sum_j c_j |phi_j><phi_j|. Each
sample draws j with weight |c_j|/||c||_1, prepends the preparation Clifford
C_j to the first k wires, and compiles the resulting generalized PBC down to a
standard PBC on the remaining t-k magic qudits. The last outcome m feeds the
unbiased estimator

    eta = 1/p + ||c||_1 sign(c_j) (p [m = 0] - 1) / p

of q0, the probability that the last measurement of the program returns 0.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from sqlalchemy.orm import Session

from . import constants, settings
from .backends import DenseBackend, PauliBackend
from .compiler import PbcSession, enumerate_program, replay_program
from .crud_rom_results import (
    create_rom_result,
    dense_coefficients,
    find_rom_result,
    sparse_coefficients,
)
from .database import SessionLocal, create_db_and_tables
from .exceptions import InvalidInputDataError, NumericalFailure, ShapeError
from .field import validate_prime
from .gates import CliffordGate
from .magic import MagicParams, magic_tensor_power
from .models import RomResponse, RomResultCreate
from .monotones import pauli_expectations, reconstruct_expectations, rom
from .pauli import PauliObservable, random_pauli
from .stabilizer_states import StabilizerBasis, load_stabilizer_basis
from .statevector import DenseState, sequential_measurement_distribution
from .tableau import synthesize_preparation_circuit

logger = logging.getLogger(__name__)

BackendFactory = Callable[[int, list[MagicParams]], PauliBackend]
Mode = Literal["session", "tabulated", "exact"]


class Decomposition(BaseModel):
    """Signed stabilizer decomposition of k copies of |T_v>, zero coefficients pruned."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: int
    k: int
    params: MagicParams
    coefficients: np.ndarray
    state_indices: list[int]
    preparations: list[list[CliffordGate]]
    l1: float
    residual: float = 0.0
    solver: str = "trivial"
    cached: bool = False

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coefficients) / np.abs(self.coefficients).sum()

    @property
    def signs(self) -> np.ndarray:
        return np.sign(self.coefficients)


class EtaSample(BaseModel):
    j: int
    m: int
    eta: float


class HybridReport(BaseModel):
    p: int
    t: int
    k: int
    l1: float
    N: int = Field(..., description="Number of samples drawn")
    q0_hat: float
    half_width: float
    seed: Optional[int] = None
    mode: Mode = "session"
    failure_probability: float = constants.DEFAULT_FAILURE_PROBABILITY
    workers: int = 1
    exact_expectation: Optional[float] = None
    q0: Optional[float] = Field(None, description="Dense-oracle probability of outcome 0")
    elapsed_seconds: Optional[float] = None


# --- Decomposition ---


def _trivial_decomposition(p: int, params: MagicParams) -> Decomposition:
    return Decomposition(
        p=p,
        k=0,
        params=params,
        coefficients=np.ones(1),
        state_indices=[0],
        preparations=[[]],
        l1=1.0,
    )


def magic_rom(
    p: int,
    copies: int,
    params: Optional[MagicParams] = None,
    solver: Optional[str] = None,
    db: Optional[Session] = None,
    basis: Optional[StabilizerBasis] = None,
    limit: Optional[int] = None,
) -> tuple[RomResponse, np.ndarray]:
    """RoM of |T_v><T_v|^(x)copies and its coefficient vector.

    With a database session the result cache is consulted first and a freshly
    solved result is stored.
    """
    validate_prime(p)
    params = params or MagicParams.default(p)
    solver = solver or settings.lp_solver()
    basis = basis if basis is not None else load_stabilizer_basis(p, copies, limit=limit)

    def response(value: float, residual: float, used: str, coefficients: np.ndarray, cached: bool):
        support = int(np.sum(np.abs(coefficients) > constants.COEFFICIENT_PRUNE_THRESHOLD))
        return RomResponse(
            p=p,
            copies=copies,
            params=params.as_tuple(),
            rom=value,
            residual=residual,
            solver=used,
            support_size=support,
            cached=cached,
        )

    if db is not None:
        row = find_rom_result(db, p, copies, params, solver)
        if row is not None and row.state_count == basis.count:
            logger.info(f"Using cached RoM {row.value:.6f} for p={p}, copies={copies}")
            coefficients = dense_coefficients(row)
            return response(row.value, row.residual, row.solver, coefficients, True), coefficients

    state = magic_tensor_power(params, copies)
    result = rom(np.outer(state, state.conj()), p, basis=basis, solver=solver)
    if db is not None:
        z, gamma, eps = params.as_tuple()
        create_rom_result(
            db,
            RomResultCreate(
                p=p,
                copies=copies,
                z=z,
                gamma=gamma,
                eps=eps,
                solver=result.solver,
                value=result.value,
                residual=result.residual,
                state_count=basis.count,
                coefficients=sparse_coefficients(result.coefficients, constants.COEFFICIENT_PRUNE_THRESHOLD),
            ),
        )
    return response(result.value, result.residual, result.solver, result.coefficients, False), result.coefficients


def decompose_magic(
    p: int,
    k: int,
    mode: Literal["optimal", "cached"] = "optimal",
    params: Optional[MagicParams] = None,
    solver: Optional[str] = None,
    db: Optional[Session] = None,
    limit: Optional[int] = None,
) -> Decomposition:
    """RoM-optimal decomposition of |T_v><T_v|^(x)k with a preparation circuit per state.

    mode="cached" reads the coefficients from the result cache and stores
    freshly computed ones there.
    """
    validate_prime(p)
    if k < 0:
        raise InvalidInputDataError("k", k, "number of virtual qudits must be non-negative")
    if mode not in ("optimal", "cached"):
        raise InvalidInputDataError("mode", mode, "decomposition mode must be 'optimal' or 'cached'")
    params = params or MagicParams.default(p)
    if k == 0:
        return _trivial_decomposition(p, params)
    basis = load_stabilizer_basis(p, k, limit=limit)
    solver = solver or settings.lp_solver()

    if mode == "cached":
        own_session = db is None
        if own_session:
            create_db_and_tables()
            db = SessionLocal()
        try:
            summary, coefficients = magic_rom(p, k, params, solver, db=db, basis=basis)
        finally:
            if own_session:
                db.close()
    else:
        summary, coefficients = magic_rom(p, k, params, solver, basis=basis)
    residual, cached = summary.residual, summary.cached

    support = np.flatnonzero(np.abs(coefficients) > constants.COEFFICIENT_PRUNE_THRESHOLD)
    values = coefficients[support]

    target = pauli_expectations(magic_tensor_power(params, k), p)
    mismatch = float(np.max(np.abs(reconstruct_expectations(basis, coefficients) - target)))
    if mismatch > 1e-6:
        raise NumericalFailure(f"decomposition reproduces the magic state only to {mismatch:.3g}")

    preparations = [synthesize_preparation_circuit(basis.tableau(int(j))) for j in support]
    logger.info(
        f"Decomposed {k} magic qudit(s) at p={p} over {support.size} stabilizer states, "
        f"l1={np.abs(values).sum():.6f}"
    )
    return Decomposition(
        p=p,
        k=k,
        params=params,
        coefficients=values,
        state_indices=support.tolist(),
        preparations=preparations,
        l1=float(np.abs(values).sum()),
        residual=max(residual, mismatch),
        solver=solver,
        cached=cached,
    )


# --- Estimator ---


def eta(m: int, sign: float, l1: float, p: int) -> float:
    """Estimator value for last outcome m; uses sum_{mu=1}^{p-1} omega^(mu m) = p [m=0] - 1."""
    indicator = 1 if m % p == 0 else 0
    return 1.0 / p + l1 * sign * (p * indicator - 1) / p


def estimator_range(l1: float, p: int, conservative: bool) -> float:
    scale = max(l1, l1 * l1) if conservative else l1
    return scale * (p - 1) / p


def _check_accuracy(accuracy: float, failure_probability: float) -> None:
    if accuracy <= 0:
        raise InvalidInputDataError("accuracy", accuracy, "accuracy must be positive")
    if not 0 < failure_probability < 1:
        raise InvalidInputDataError(
            "failure_probability", failure_probability, "failure probability must lie in (0, 1)"
        )


def plan_samples(
    accuracy: float,
    failure_probability: float,
    l1: float,
    p: int,
    conservative: bool = False,
) -> int:
    """Hoeffding sample count N = ceil(2 r^2 ln(2/q) / eps^2) for eta in [1/p - r, 1/p + r].

    r is l1 (p-1)/p; conservative=True uses max(l1, l1^2) (p-1)/p instead.
    """
    _check_accuracy(accuracy, failure_probability)
    r = estimator_range(l1, p, conservative)
    return max(1, math.ceil(2 * r * r * math.log(2 / failure_probability) / accuracy**2))


def half_width(samples: int, failure_probability: float, l1: float, p: int, conservative: bool = False) -> float:
    """Hoeffding confidence half-width after the given number of samples."""
    if samples <= 0:
        return math.inf
    r = estimator_range(l1, p, conservative)
    return 2 * r * math.sqrt(math.log(2 / failure_probability) / (2 * samples))


# --- Programs ---


def random_program(
    p: int, t: int, length: int, rng: np.random.Generator, random_phase: bool = True
) -> list[PauliObservable]:
    """Sequence of non-identity Pauli measurements on t qudits."""
    validate_prime(p)
    if t < 1 or length < 1:
        raise InvalidInputDataError("length", length, "a program needs at least one qudit and one measurement")
    return [random_pauli(p, t, rng, allow_identity=False, random_phase=random_phase) for _ in range(length)]


def _check_program(program: Sequence[PauliObservable], p: int, t: int, k: int) -> None:
    if not program:
        raise InvalidInputDataError("program", "[]", "program must contain at least one measurement")
    for M in program:
        if M.p != p or M.n != t:
            raise ShapeError(f"Program observable {M.label()} is not on {t} qudits of dimension {p}.")
    if not 0 <= k <= t:
        raise InvalidInputDataError("k", k, f"virtual qudits must lie between 0 and t={t}")


def exact_q0(
    program: Sequence[PauliObservable], p: int, t: int, params: Optional[MagicParams] = None
) -> float:
    """Dense-oracle probability that the last measurement returns 0 on |T_v>^(x)t."""
    _check_program(program, p, t, 0)
    params = params or MagicParams.default(p)
    state = DenseState.from_vector(p, magic_tensor_power(params, t))
    distribution = sequential_measurement_distribution(state, program)
    return float(sum(prob for outcomes, prob in distribution.items() if outcomes[-1] == 0))


def _default_backend(p: int, params: list[MagicParams]) -> PauliBackend:
    return DenseBackend(p, params)


def _session(decomposition: Decomposition, t: int, backend_factory: BackendFactory, rng=None) -> PbcSession:
    p, k = decomposition.p, decomposition.k
    backend = backend_factory(p, [decomposition.params] * (t - k))
    return PbcSession(p, k, t - k, backend, rng)


def branch_q0(
    program: Sequence[PauliObservable],
    decomposition: Decomposition,
    t: int,
    backend_factory: BackendFactory = _default_backend,
) -> np.ndarray:
    """Exact q0_j of the reduced program for every state of the decomposition."""
    values = np.empty(len(decomposition.state_indices))
    for i, prefix in enumerate(decomposition.preparations):
        distribution = enumerate_program(program, _session(decomposition, t, backend_factory), prefix)
        values[i] = sum(prob for outcomes, prob in distribution.items() if outcomes[-1] == 0)
    return values


def exact_expectation(
    program: Sequence[PauliObservable],
    decomposition: Decomposition,
    t: int,
    backend_factory: BackendFactory = _default_backend,
) -> float:
    """sum_j qbar_j E_j[eta], computed by enumerating every compiler branch."""
    p, l1 = decomposition.p, decomposition.l1
    q0 = branch_q0(program, decomposition, t, backend_factory)
    values = 1.0 / p + l1 * decomposition.signs * (p * q0 - 1) / p
    return float(np.dot(decomposition.weights, values))


def draw_eta_sample(
    program: Sequence[PauliObservable],
    decomposition: Decomposition,
    t: int,
    rng: np.random.Generator,
    backend_factory: BackendFactory = _default_backend,
) -> EtaSample:
    """One hybrid run: sample j, compile the generalized PBC, execute on t-k qudits."""
    j = int(rng.choice(len(decomposition.state_indices), p=decomposition.weights))
    session = _session(decomposition, t, backend_factory, rng)
    outcomes = replay_program(program, session, decomposition.preparations[j])
    m = outcomes[-1]
    return EtaSample(
        j=j,
        m=m,
        eta=eta(m, float(decomposition.signs[j]), decomposition.l1, decomposition.p),
    )


def _sample_block(
    mode: Mode,
    count: int,
    rng: np.random.Generator,
    program: Sequence[PauliObservable],
    decomposition: Decomposition,
    t: int,
    backend_factory: BackendFactory,
    q0_table: Optional[np.ndarray],
) -> np.ndarray:
    if count == 0:
        return np.empty(0)
    if mode == "tabulated":
        p, l1 = decomposition.p, decomposition.l1
        js = rng.choice(len(decomposition.state_indices), size=count, p=decomposition.weights)
        zero = rng.random(count) < q0_table[js]
        return 1.0 / p + l1 * decomposition.signs[js] * (p * zero - 1) / p
    return np.array(
        [draw_eta_sample(program, decomposition, t, rng, backend_factory).eta for _ in range(count)]
    )


def hybrid_estimate(
    program: Sequence[PauliObservable],
    t: int,
    k: int,
    samples: int,
    rng: np.random.Generator,
    decomposition: Optional[Decomposition] = None,
    params: Optional[MagicParams] = None,
    mode: Mode = "session",
    failure_probability: float = constants.DEFAULT_FAILURE_PROBABILITY,
    workers: int = 1,
    backend_factory: BackendFactory = _default_backend,
) -> HybridReport:
    """Estimate q0 of a standard PBC on t magic qudits with k of them virtual.

    session    every sample compiles and runs the reduced program on the backend
    tabulated  exact q0_j per state, then samples (j, [m = 0]) directly
    exact      no sampling; returns sum_j qbar_j E_j[eta]

    With workers > 1 the samples are split over threads with child generators
    spawned from rng; results then depend on the worker count.
    """
    if not program:
        raise InvalidInputDataError("program", "[]", "program must contain at least one measurement")
    p = program[0].p
    _check_program(program, p, t, k)
    if samples < 0:
        raise InvalidInputDataError("samples", samples, "sample count must be non-negative")
    if workers < 1:
        raise InvalidInputDataError("workers", workers, "at least one worker is required")
    if decomposition is None:
        decomposition = decompose_magic(p, k, params=params)
    if decomposition.k != k or decomposition.p != p:
        raise ShapeError(
            f"Decomposition covers k={decomposition.k} (p={decomposition.p}); estimate needs k={k} (p={p})."
        )

    start = time.perf_counter()
    report = dict(
        p=p,
        t=t,
        k=k,
        l1=decomposition.l1,
        mode=mode,
        failure_probability=failure_probability,
        workers=workers,
    )
    if mode == "exact":
        expectation = exact_expectation(program, decomposition, t, backend_factory)
        return HybridReport(
            **report,
            N=0,
            q0_hat=expectation,
            half_width=0.0,
            exact_expectation=expectation,
            elapsed_seconds=time.perf_counter() - start,
        )
    if mode not in ("session", "tabulated"):
        raise InvalidInputDataError("mode", mode, "mode must be 'session', 'tabulated' or 'exact'")
    if samples == 0:
        raise InvalidInputDataError("samples", samples, "sampling modes need at least one sample")

    q0_table = branch_q0(program, decomposition, t, backend_factory) if mode == "tabulated" else None
    args = (program, decomposition, t, backend_factory, q0_table)
    if workers == 1:
        values = _sample_block(mode, samples, rng, *args)
    else:
        sizes = [samples // workers + (1 if i < samples % workers else 0) for i in range(workers)]
        streams = rng.spawn(workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(
                pool.map(lambda job: _sample_block(mode, job[0], job[1], *args), zip(sizes, streams))
            )
        values = np.concatenate(blocks)

    estimate = float(values.mean())
    width = half_width(samples, failure_probability, decomposition.l1, p)
    logger.info(
        f"Hybrid estimate p={p}, t={t}, k={k}: q0_hat={estimate:.6f} +/- {width:.6f} from {samples} samples"
    )
    return HybridReport(
        **report,
        N=samples,
        q0_hat=estimate,
        half_width=width,
        elapsed_seconds=time.perf_counter() - start,
    )
