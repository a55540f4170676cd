# core/statevector.py
"""Dense statevector oracle for small instances.

States are complex vectors of length p^n with qudit 0 as the most significant
factor. Every run enumerates measurement branches depth first and prunes
branches whose probability falls below BRANCH_PRUNE_THRESHOLD.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from . import constants
from .circuit import CircuitIR, Correction, FinalMeasure, GadgetizedCircuit, Measure, MidMeasure, UvGate
from .emitter import (
    AdaptiveCircuit,
    AncillaMeasure,
    AncillaReset,
    ClassicalCombine,
    ConditionalPauli,
)
from .exceptions import NormalizationError, ShapeError
from .gates import CliffordGate, GateKind
from .magic import MagicParams, magic_state_vector, uv_diagonal
from .pauli import PauliObservable, apply_pauli_to_vector, check_dimension, roots_of_unity

logger = logging.getLogger(__name__)

Distribution = dict[tuple[int, ...], float]


@dataclass
class DenseState:
    p: int
    n: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, p: int, n: int) -> "DenseState":
        dim = check_dimension(p, n)
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[0] = 1.0
        return cls(p=p, n=n, amplitudes=amplitudes)

    @classmethod
    def from_vector(cls, p: int, vector) -> "DenseState":
        amplitudes = np.asarray(vector, dtype=complex).reshape(-1)
        n = 0
        dim = 1
        while dim < amplitudes.size:
            dim *= p
            n += 1
        if dim != amplitudes.size:
            raise ShapeError(f"Vector length {amplitudes.size} is not a power of {p}.")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > constants.NORM_TOLERANCE * max(1, amplitudes.size):
            raise NormalizationError(norm)
        return cls(p=p, n=n, amplitudes=amplitudes)

    def tensor(self, other: "DenseState") -> "DenseState":
        check_dimension(self.p, self.n + other.n)
        return DenseState(self.p, self.n + other.n, np.kron(self.amplitudes, other.amplitudes))

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.p,) * self.n) if self.n else self.amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class Branch:
    probability: float
    state: DenseState
    record: dict = field(default_factory=dict)


# --- Gate matrices ---


@lru_cache(maxsize=None)
def fourier_matrix(p: int) -> np.ndarray:
    omega = roots_of_unity(p)
    j = np.arange(p)
    matrix = omega[np.outer(j, j) % p] / np.sqrt(p)
    matrix.setflags(write=False)
    return matrix


def _phase_diagonal(kind: GateKind, p: int, power: int) -> Optional[np.ndarray]:
    omega = roots_of_unity(p)
    j = np.arange(p)
    if kind is GateKind.Z:
        return omega[(power * j) % p]
    if kind in (GateKind.S, GateKind.SINV):
        sign = 1 if kind is GateKind.S else -1
        return omega[(sign * power * (j * (j - 1) // 2)) % p]
    return None


def gate_matrix(kind: GateKind, p: int, power: int = 1) -> np.ndarray:
    """Single-qudit unitary for F, F^dag, S, S^dag, X or Z raised to power."""
    kind = GateKind(kind)
    if kind is GateKind.F:
        return np.linalg.matrix_power(fourier_matrix(p), power % 4)
    if kind is GateKind.FINV:
        return np.linalg.matrix_power(fourier_matrix(p).conj().T, power % 4)
    if kind is GateKind.X:
        return np.roll(np.eye(p, dtype=complex), power % p, axis=0)
    diagonal = _phase_diagonal(kind, p, power)
    if diagonal is None:
        raise ShapeError(f"{kind.value} is not a single-qudit gate.")
    return np.diag(diagonal)


def correction_matrix(params: MagicParams, sigma: int) -> np.ndarray:
    """C_sigma = U_v (X^dag)^sigma U_v^dag."""
    diagonal = uv_diagonal(params)
    shift = gate_matrix(GateKind.X, params.p, -sigma)
    return (diagonal[:, None] * shift) * diagonal.conj()[None, :]


# --- Application ---


def apply_matrix(state: DenseState, matrix: np.ndarray, wire: int) -> DenseState:
    if not 0 <= wire < state.n:
        raise IndexError(f"Wire {wire} out of range for {state.n} qudits.")
    moved = np.tensordot(matrix, state.as_tensor(), axes=([1], [wire]))
    result = np.moveaxis(moved, 0, wire)
    return DenseState(state.p, state.n, result.reshape(-1))


def apply_diagonal(state: DenseState, diagonal: np.ndarray, wire: int) -> DenseState:
    if not 0 <= wire < state.n:
        raise IndexError(f"Wire {wire} out of range for {state.n} qudits.")
    shape = [1] * state.n
    shape[wire] = state.p
    result = state.as_tensor() * diagonal.reshape(shape)
    return DenseState(state.p, state.n, result.reshape(-1))


def apply_sum(state: DenseState, control: int, target: int, power: int = 1) -> DenseState:
    """SUM^k |j>|l> = |j>|l + k j> on (control, target)."""
    p, n = state.p, state.n
    for w in (control, target):
        if not 0 <= w < n:
            raise IndexError(f"Wire {w} out of range for {n} qudits.")
    tensor = state.as_tensor()
    out = np.empty_like(tensor)
    target_axis = target if target < control else target - 1
    for j in range(p):
        index = [slice(None)] * n
        index[control] = j
        index = tuple(index)
        out[index] = np.roll(tensor[index], (power * j) % p, axis=target_axis)
    return DenseState(p, n, out.reshape(-1))


def apply_gate(state: DenseState, g: CliffordGate) -> DenseState:
    if g.kind is GateKind.SUM:
        return apply_sum(state, g.control, g.target, g.power)
    diagonal = _phase_diagonal(g.kind, state.p, g.power)
    if diagonal is not None:
        return apply_diagonal(state, diagonal, g.target)
    return apply_matrix(state, gate_matrix(g.kind, state.p, g.power), g.target)


def apply_gates(state: DenseState, gates: Sequence[CliffordGate]) -> DenseState:
    for g in gates:
        state = apply_gate(state, g)
    return state


def apply_uv(state: DenseState, params: MagicParams, wire: int) -> DenseState:
    return apply_diagonal(state, uv_diagonal(params), wire)


def apply_pauli(state: DenseState, P: PauliObservable) -> DenseState:
    if P.n != state.n or P.p != state.p:
        raise ShapeError(f"Observable on {P.n} qudits does not fit a {state.n}-qudit state.")
    return DenseState(state.p, state.n, apply_pauli_to_vector(P, state.amplitudes))


# --- Measurement ---


def project_pauli(state: DenseState, M: PauliObservable, sigma: int) -> np.ndarray:
    """Unnormalized P(M, sigma)|psi> = (1/p) sum_k omega^(-k sigma) M^k |psi>."""
    p = state.p
    omega = roots_of_unity(p)
    acc = state.amplitudes.copy()
    current = state.amplitudes
    for k in range(1, p):
        current = apply_pauli_to_vector(M, current)
        acc = acc + omega[(-k * sigma) % p] * current
    return acc / p


def measure_projector(
    state: DenseState, M: PauliObservable, sigma: int
) -> tuple[float, Optional[DenseState]]:
    """Probability of outcome sigma and the normalized post-measurement state."""
    projected = project_pauli(state, M, sigma)
    probability = float(np.vdot(projected, projected).real)
    if probability < constants.BRANCH_PRUNE_THRESHOLD:
        return probability, None
    return probability, DenseState(state.p, state.n, projected / np.sqrt(probability))


def outcome_probabilities(state: DenseState, M: PauliObservable) -> np.ndarray:
    return np.array([measure_projector(state, M, s)[0] for s in range(state.p)])


def expectation(state: DenseState, M: PauliObservable) -> complex:
    return complex(np.vdot(state.amplitudes, apply_pauli_to_vector(M, state.amplitudes)))


def project_wire(state: DenseState, wire: int, outcome: int) -> tuple[float, Optional[DenseState]]:
    """Computational-basis outcome on one wire."""
    tensor = state.as_tensor()
    index = [slice(None)] * state.n
    projected = np.zeros_like(tensor)
    index[wire] = outcome
    projected[tuple(index)] = tensor[tuple(index)]
    probability = float(np.vdot(projected, projected).real)
    if probability < constants.BRANCH_PRUNE_THRESHOLD:
        return probability, None
    return probability, DenseState(state.p, state.n, projected.reshape(-1) / np.sqrt(probability))


def _measure_wire_branches(state: DenseState, wire: int) -> Iterator[tuple[int, float, DenseState]]:
    for outcome in range(state.p):
        probability, post = project_wire(state, wire, outcome)
        if post is not None:
            yield outcome, probability, post


def _reset_branches(state: DenseState, wire: int) -> Iterator[tuple[float, DenseState]]:
    for outcome, probability, post in _measure_wire_branches(state, wire):
        if outcome:
            post = apply_matrix(post, gate_matrix(GateKind.X, state.p, -outcome), wire)
        yield probability, post


def fidelity(a, b) -> float:
    va = a.amplitudes if isinstance(a, DenseState) else np.asarray(a)
    vb = b.amplitudes if isinstance(b, DenseState) else np.asarray(b)
    return float(abs(np.vdot(va, vb)) ** 2)


def subsystem_state(state: DenseState, keep: Sequence[int]) -> DenseState:
    """Pure state on `keep` (in that order) when the rest is a product basis state."""
    others = [w for w in range(state.n) if w not in keep]
    tensor = np.transpose(state.as_tensor(), list(others) + list(keep))
    flat = tensor.reshape(state.p ** len(others), -1)
    row = int(np.argmax(np.linalg.norm(flat, axis=1)))
    vector = flat[row]
    return DenseState(state.p, len(keep), vector / np.linalg.norm(vector))


# --- Circuit runs ---


def _to_distribution(branches: Sequence[Branch], key) -> Distribution:
    dist: Distribution = {}
    for b in branches:
        k = key(b)
        dist[k] = dist.get(k, 0.0) + b.probability
    return dist


def run_circuit(ir: CircuitIR) -> list[Branch]:
    """All branches of a Clifford+U_v circuit from |0...0>; record['outcomes'] in MEASURE order."""
    branches = [Branch(1.0, DenseState.zero(ir.p, ir.n), {"outcomes": ()})]
    for g in ir.gates:
        if isinstance(g, CliffordGate):
            for b in branches:
                b.state = apply_gate(b.state, g)
        elif isinstance(g, UvGate):
            params = g.params(ir.p)
            for b in branches:
                b.state = apply_uv(b.state, params, g.target)
        elif isinstance(g, Measure):
            branches = [
                Branch(b.probability * prob, post, {"outcomes": b.record["outcomes"] + (outcome,)})
                for b in branches
                for outcome, prob, post in _measure_wire_branches(b.state, g.target)
                if b.probability * prob >= constants.BRANCH_PRUNE_THRESHOLD
            ]
    return branches


def circuit_distribution(ir: CircuitIR) -> Distribution:
    return _to_distribution(run_circuit(ir), lambda b: b.record["outcomes"])


def gadgetized_initial_state(gc: GadgetizedCircuit) -> DenseState:
    check_dimension(gc.p, gc.wires)
    state = DenseState.zero(gc.p, gc.n_data)
    for params in gc.magic_params:
        state = state.tensor(DenseState(gc.p, 1, magic_state_vector(gc.p, *params.as_tuple())))
    return state


def run_gadgetized(gc: GadgetizedCircuit, stop_before_final: bool = False) -> list[Branch]:
    """Branches over mid-circuit outcomes (record['mids'][id]) and final outcomes."""
    branches = [Branch(1.0, gadgetized_initial_state(gc), {"mids": {}, "outcomes": ()})]
    for e in gc.elements:
        if isinstance(e, CliffordGate):
            for b in branches:
                b.state = apply_gate(b.state, e)
        elif isinstance(e, Correction):
            params = e.params(gc.p)
            for b in branches:
                sigma = b.record["mids"][e.id]
                if sigma:
                    b.state = apply_matrix(b.state, correction_matrix(params, sigma), e.wire)
        elif isinstance(e, MidMeasure):
            branches = [
                Branch(
                    b.probability * prob,
                    post,
                    {"mids": {**b.record["mids"], e.id: outcome}, "outcomes": b.record["outcomes"]},
                )
                for b in branches
                for outcome, prob, post in _measure_wire_branches(b.state, e.wire)
                if b.probability * prob >= constants.BRANCH_PRUNE_THRESHOLD
            ]
        elif isinstance(e, FinalMeasure):
            if stop_before_final:
                break
            branches = [
                Branch(
                    b.probability * prob,
                    post,
                    {"mids": b.record["mids"], "outcomes": b.record["outcomes"] + (outcome,)},
                )
                for b in branches
                for outcome, prob, post in _measure_wire_branches(b.state, e.wire)
                if b.probability * prob >= constants.BRANCH_PRUNE_THRESHOLD
            ]
    return branches


def gadgetized_distribution(gc: GadgetizedCircuit) -> Distribution:
    return _to_distribution(run_gadgetized(gc), lambda b: b.record["outcomes"])


def _evaluate(terms: dict[str, int], offset: int, registers: dict[str, int], p: int) -> int:
    return (offset + sum(c * registers[label] for label, c in terms.items())) % p


def adaptive_initial_state(c: AdaptiveCircuit, input_state: Optional[DenseState] = None) -> DenseState:
    check_dimension(c.p, c.wires)
    if input_state is None:
        if c.magic_params:
            input_state = DenseState(c.p, 0, np.ones(1, dtype=complex))
            for params in c.magic_params:
                single = magic_state_vector(c.p, *params.as_tuple())
                input_state = input_state.tensor(DenseState(c.p, 1, single))
        else:
            input_state = DenseState.zero(c.p, c.t)
    if input_state.n != c.t:
        raise ShapeError(f"Input state has {input_state.n} qudits, circuit has {c.t} computational wires.")
    if c.ancillas:
        input_state = input_state.tensor(DenseState.zero(c.p, c.ancillas))
    return input_state


def run_adaptive(c: AdaptiveCircuit, input_state: Optional[DenseState] = None) -> list[Branch]:
    """Branches of an adaptive circuit; record['registers'] holds every classical label."""
    p = c.p
    branches = [Branch(1.0, adaptive_initial_state(c, input_state), {"registers": {}})]
    for e in c.elements:
        if isinstance(e, CliffordGate):
            for b in branches:
                b.state = apply_gate(b.state, e)
        elif isinstance(e, ClassicalCombine):
            for b in branches:
                b.record["registers"][e.label] = _evaluate(e.terms, e.offset, b.record["registers"], p)
        elif isinstance(e, ConditionalPauli):
            for b in branches:
                power = _evaluate(e.terms, e.offset, b.record["registers"], p)
                if power:
                    kind = GateKind.X if e.kind == "X" else GateKind.Z
                    b.state = apply_gate(b.state, CliffordGate(kind=kind, target=e.wire, power=power))
        elif isinstance(e, AncillaMeasure):
            branches = [
                Branch(b.probability * prob, post, {"registers": {**b.record["registers"], e.label: outcome}})
                for b in branches
                for outcome, prob, post in _measure_wire_branches(b.state, e.wire)
                if b.probability * prob >= constants.BRANCH_PRUNE_THRESHOLD
            ]
        elif isinstance(e, AncillaReset):
            branches = [
                Branch(b.probability * prob, post, {"registers": dict(b.record["registers"])})
                for b in branches
                for prob, post in _reset_branches(b.state, e.wire)
                if b.probability * prob >= constants.BRANCH_PRUNE_THRESHOLD
            ]
    logger.debug(f"Adaptive run finished with {len(branches)} branches")
    return branches


def adaptive_distribution(c: AdaptiveCircuit, input_state: Optional[DenseState] = None) -> Distribution:
    return _to_distribution(
        run_adaptive(c, input_state),
        lambda b: tuple(b.record["registers"][label] for label in c.outputs),
    )


def sequential_measurement_distribution(
    state: DenseState, program: Sequence[PauliObservable]
) -> Distribution:
    """Reference joint distribution of measuring each observable in turn."""
    branches = [(1.0, state, ())]
    for M in program:
        nxt = []
        for weight, current, outcomes in branches:
            for sigma in range(state.p):
                probability, post = measure_projector(current, M, sigma)
                if post is not None and weight * probability >= constants.BRANCH_PRUNE_THRESHOLD:
                    nxt.append((weight * probability, post, outcomes + (sigma,)))
        branches = nxt
    dist: Distribution = {}
    for weight, _, outcomes in branches:
        dist[outcomes] = dist.get(outcomes, 0.0) + weight
    return dist


def total_variation(a: Distribution, b: Distribution) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)
