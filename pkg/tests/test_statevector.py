# tests/test_statevector.py

import numpy as np
import pytest

from core.circuit import gadgetize, parse, random_circuit
from core.exceptions import NormalizationError, OracleTooLarge, ShapeError
from core.gates import gate
from core.magic import MagicParams
from core.pauli import PauliObservable, dense_matrix, random_pauli
from core.statevector import (
    DenseState,
    apply_gate,
    apply_uv,
    circuit_distribution,
    correction_matrix,
    expectation,
    gadgetized_distribution,
    measure_projector,
    outcome_probabilities,
    project_pauli,
    sequential_measurement_distribution,
    total_variation,
)


def _random_state(p: int, n: int, rng) -> DenseState:
    v = rng.normal(size=p**n) + 1j * rng.normal(size=p**n)
    return DenseState.from_vector(p, v / np.linalg.norm(v))


def test_fourier_on_zero_is_uniform():
    state = apply_gate(DenseState.zero(3, 1), gate("F", 0))
    np.testing.assert_allclose(state.amplitudes, np.ones(3) / np.sqrt(3))


def test_sum_adds_control_into_target():
    basis = np.zeros(9)
    basis[1 * 3 + 2] = 1
    state = apply_gate(DenseState.from_vector(3, basis), gate("SUM", 1, control=0))
    assert np.argmax(np.abs(state.amplitudes)) == 1 * 3 + 0


def test_phase_gate_on_one_is_trivial():
    basis = np.zeros(5)
    basis[1] = 1
    state = apply_gate(DenseState.from_vector(5, basis), gate("S", 0))
    np.testing.assert_allclose(state.amplitudes, basis)


@pytest.mark.parametrize(
    "g",
    [gate("F", 1), gate("FINV", 0), gate("S", 2, power=3), gate("SUM", 0, control=2, power=2), gate("X", 1, power=4)],
)
def test_gates_preserve_norm(g):
    state = _random_state(5, 3, np.random.default_rng(0))
    assert apply_gate(state, g).norm() == pytest.approx(1.0, abs=1e-12)


def test_from_vector_checks_norm_and_length():
    with pytest.raises(NormalizationError):
        DenseState.from_vector(3, np.ones(3))
    with pytest.raises(ShapeError, match="not a power of 3"):
        DenseState.from_vector(3, np.ones(4) / 2)


def test_oracle_limit_is_enforced(monkeypatch):
    monkeypatch.setenv("QPBC_ORACLE_LIMIT", "1000")
    with pytest.raises(OracleTooLarge):
        DenseState.zero(3, 7)


# --- Projective measurement ---


def test_measure_z_on_zero():
    probability, post = measure_projector(DenseState.zero(3, 1), PauliObservable.single(3, 1, 0, z=1), 0)
    assert probability == pytest.approx(1.0)
    np.testing.assert_allclose(post.amplitudes, [1, 0, 0], atol=1e-12)


def test_measure_x_on_zero_is_uniform():
    probabilities = outcome_probabilities(DenseState.zero(3, 1), PauliObservable.single(3, 1, 0, x=1))
    np.testing.assert_allclose(probabilities, np.full(3, 1 / 3))


@pytest.mark.parametrize("p", [3, 5])
def test_outcome_probabilities_sum_to_one(p):
    rng = np.random.default_rng(p)
    for _ in range(10):
        state = _random_state(p, 2, rng)
        M = random_pauli(p, 2, rng)
        assert outcome_probabilities(state, M).sum() == pytest.approx(1.0, abs=1e-12)


def test_projectors_are_orthogonal_idempotents():
    rng = np.random.default_rng(5)
    p = 3
    M = random_pauli(p, 2, rng, allow_identity=False)
    projectors = []
    for sigma in range(p):
        columns = [project_pauli(DenseState(p, 2, np.eye(9)[i].astype(complex)), M, sigma) for i in range(9)]
        projectors.append(np.array(columns).T)
    for s, P in enumerate(projectors):
        np.testing.assert_allclose(P @ P, P, atol=1e-12)
        for t, Q in enumerate(projectors):
            if s != t:
                np.testing.assert_allclose(P @ Q, 0, atol=1e-12)
    np.testing.assert_allclose(sum(projectors), np.eye(9), atol=1e-12)


def test_expectation_matches_dense():
    rng = np.random.default_rng(2)
    state = _random_state(3, 2, rng)
    M = random_pauli(3, 2, rng)
    assert expectation(state, M) == pytest.approx(np.vdot(state.amplitudes, dense_matrix(M) @ state.amplitudes))


def test_correction_matrix_conjugates_pauli():
    params = MagicParams(p=3, z=1, gamma=2, eps=0)
    C = correction_matrix(params, 1)
    X = dense_matrix(PauliObservable.single(3, 1, 0, x=1))
    expected = dense_matrix(PauliObservable(p=3, n=1, lam=1, x=(1,), z=(1,)))
    np.testing.assert_allclose(C @ X @ C.conj().T, expected, atol=1e-9)


# --- Distributions ---


def test_deterministic_circuit_is_point_mass():
    ir = parse("qudits 2 dim 3\nX 0 2\nSUM 0 1\nMEASURE 0\nMEASURE 1\n")
    assert circuit_distribution(ir) == pytest.approx({(2, 2): 1.0})


def test_fourier_then_measure_is_uniform():
    dist = circuit_distribution(parse("qudits 1 dim 3\nF 0\nMEASURE 0\n"))
    assert dist == pytest.approx({(0,): 1 / 3, (1,): 1 / 3, (2,): 1 / 3})


def test_uv_is_diagonal():
    state = apply_uv(apply_gate(DenseState.zero(3, 1), gate("F", 0)), MagicParams.default(3), 0)
    assert state.norm() == pytest.approx(1.0)
    dist = circuit_distribution(parse("qudits 1 dim 3\nUV 0 1 2 0\nMEASURE 0\n"))
    assert dist == pytest.approx({(0,): 1.0})


@pytest.mark.parametrize("seed", range(6))
def test_gadgetized_circuit_matches_original(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 2
    t = 1 + seed % 3
    ir = random_circuit(3, n, t, n, 6, rng)
    assert total_variation(gadgetized_distribution(gadgetize(ir)), circuit_distribution(ir)) <= 1e-9


def test_gadgetized_ququint_circuit_matches_original():
    ir = parse("qudits 1 dim 5\nF 0\nUV 0 1 4 0\nF 0\nUV 0 2 3 1\nFINV 0\nMEASURE 0\n")
    assert total_variation(gadgetized_distribution(gadgetize(ir)), circuit_distribution(ir)) <= 1e-9


def test_sequential_distribution_of_commuting_program():
    state = DenseState.zero(3, 2)
    program = [PauliObservable.single(3, 2, 0, z=1), PauliObservable.single(3, 2, 1, x=1)]
    dist = sequential_measurement_distribution(state, program)
    assert dist == pytest.approx({(0, 0): 1 / 3, (0, 1): 1 / 3, (0, 2): 1 / 3})
