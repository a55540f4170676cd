# tests/test_emitter.py

import numpy as np
import pytest

from core.emitter import (
    AncillaMeasure,
    ClassicalCombine,
    emit_method1,
    emit_method2,
    ghz_prep_circuit,
    optimize_k,
    render_adaptive,
    stats,
    sum_cost,
)
from core.exceptions import NoOpObservable, ShapeError
from core.gates import CliffordGate, GateKind
from core.magic import MagicParams, magic_tensor_power
from core.pauli import PauliObservable, random_pauli
from core.statevector import (
    DenseState,
    adaptive_distribution,
    fidelity,
    run_adaptive,
    sequential_measurement_distribution,
    total_variation,
)


def _ghz_vector(p: int, t: int) -> np.ndarray:
    vector = np.zeros(p**t)
    step = (p**t - 1) // (p - 1)
    vector[[x * step for x in range(p)]] = 1 / np.sqrt(p)
    return vector


def _magic_input(p: int, t: int) -> DenseState:
    return DenseState.from_vector(p, magic_tensor_power(MagicParams.default(p), t))


# --- k scaling ---


def test_optimize_k_prefers_cheaper_scaling():
    M = PauliObservable(p=5, n=2, x=(4, 0), z=(0, 3))
    scaling = optimize_k(M)
    assert (scaling.k, scaling.cost) == (4, 3)
    assert scaling.inverse_k == 4
    assert sum_cost(scaling.observable) == 3


def test_optimize_k_keeps_one_when_already_optimal():
    scaling = optimize_k(PauliObservable(p=3, n=1, x=(1,), z=(1,)))
    assert (scaling.k, scaling.cost) == (1, 1)


def test_optimize_k_rejects_identity():
    with pytest.raises(NoOpObservable):
        optimize_k(PauliObservable.identity(5, 2))


def test_sum_cost_counts_x_then_z():
    assert sum_cost(PauliObservable(p=5, n=3, x=(2, 0, 1), z=(0, 3, 2))) == 6


# --- Method 1 ---


def test_method1_block_for_single_z():
    c = emit_method1([PauliObservable.single(3, 1, 0, z=1)])
    assert c.outputs == ["sigma0"]
    assert c.wires == 2
    kinds = [e.kind for e in c.elements if isinstance(e, CliffordGate)]
    assert kinds == [GateKind.F, GateKind.FINV, GateKind.SUM, GateKind.F, GateKind.FINV]
    assert isinstance(c.elements[-2], AncillaMeasure)
    assert isinstance(c.elements[-1], ClassicalCombine)


def test_method1_sum_count():
    c = emit_method1([PauliObservable(p=5, n=3, x=(2, 0, 1), z=(0, 3, 2))])
    assert stats(c).sum_count == 6
    assert stats(c).block_sum_counts == [6]


def test_identity_observable_becomes_classical_constant():
    c = emit_method1([PauliObservable.identity(3, 1).shift_phase(2)])
    assert c.blocks[0].raw_labels == []
    assert adaptive_distribution(c) == pytest.approx({(2,): 1.0})


def test_empty_program_needs_wire_count():
    with pytest.raises(ShapeError, match="explicit wire count"):
        emit_method1([])
    assert emit_method1([], t=2).elements == []


def test_mixed_program_is_rejected():
    with pytest.raises(ShapeError, match="Observable 1"):
        emit_method1([PauliObservable.single(3, 2, 0, z=1), PauliObservable.single(3, 1, 0, z=1)])


@pytest.mark.parametrize("emit", [emit_method1, emit_method2])
@pytest.mark.parametrize("optimize", [False, True])
@pytest.mark.parametrize("p", [3, 5])
def test_emitted_circuit_reproduces_sequential_measurement(emit, optimize, p):
    rng = np.random.default_rng(p + int(optimize))
    program = [random_pauli(p, 2, rng, allow_identity=False) for _ in range(2)]
    c = emit(program, optimize=optimize, magic_params=[MagicParams.default(p)] * 2)
    reference = sequential_measurement_distribution(_magic_input(p, 2), program)
    assert total_variation(adaptive_distribution(c), reference) <= 1e-9


def test_emitted_circuit_accepts_explicit_input_state():
    rng = np.random.default_rng(3)
    program = [random_pauli(3, 2, rng, allow_identity=False)]
    state = DenseState.zero(3, 2)
    c = emit_method1(program)
    reference = sequential_measurement_distribution(state, program)
    assert total_variation(adaptive_distribution(c, state), reference) <= 1e-9


def test_input_state_size_is_checked():
    c = emit_method1([PauliObservable.single(3, 2, 0, z=1)])
    with pytest.raises(ShapeError, match="computational wires"):
        run_adaptive(c, DenseState.zero(3, 1))


# --- Method 2 and GHZ ---


@pytest.mark.parametrize("t, p", [(2, 3), (3, 3), (4, 5), (5, 3), (6, 3)])
def test_ghz_preparation_on_every_branch(t, p):
    target = _ghz_vector(p, t)
    branches = run_adaptive(ghz_prep_circuit(t, p))
    assert sum(b.probability for b in branches) == pytest.approx(1.0)
    for b in branches:
        assert fidelity(b.state, target) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
def test_ghz_preparation_on_eight_qutrits():
    target = _ghz_vector(3, 8)
    for b in run_adaptive(ghz_prep_circuit(8, 3)):
        assert fidelity(b.state, target) == pytest.approx(1.0, abs=1e-9)


def test_ghz_needs_two_qudits():
    with pytest.raises(ShapeError, match="at least 2"):
        ghz_prep_circuit(1, 3)


def test_ghz_depth_does_not_grow_with_size():
    assert stats(ghz_prep_circuit(10, 3)).depth == stats(ghz_prep_circuit(20, 3)).depth


def test_ghz_depth_for_odd_sizes():
    odd = stats(ghz_prep_circuit(9, 3)).depth
    assert odd == stats(ghz_prep_circuit(21, 3)).depth
    assert odd <= stats(ghz_prep_circuit(8, 3)).depth + 1


def test_method2_uses_same_sums_as_method1():
    rng = np.random.default_rng(12)
    program = [random_pauli(3, 3, rng, allow_identity=False) for _ in range(3)]
    one, two = stats(emit_method1(program)), stats(emit_method2(program))
    assert one.sum_count == two.sum_count
    assert two.prep_sum_count > 0
    assert one.prep_sum_count == 0


# --- Accounting ---


@pytest.mark.parametrize("p, t", [(3, 2), (5, 3), (7, 4)])
def test_sum_count_respects_upper_bound(p, t):
    rng = np.random.default_rng(p * t)
    program = [random_pauli(p, t, rng, allow_identity=False) for _ in range(t)]
    report = stats(emit_method1(program))
    assert report.sum_upper_bound == (p - 1) * t * t
    assert report.sum_count <= report.sum_upper_bound


@pytest.mark.parametrize("p", [3, 5, 7])
def test_optimization_never_adds_sums(p):
    rng = np.random.default_rng(40 + p)
    program = [random_pauli(p, 3, rng, allow_identity=False) for _ in range(5)]
    plain = stats(emit_method1(program)).block_sum_counts
    optimized = stats(emit_method1(program, optimize=True)).block_sum_counts
    assert all(o <= u for o, u in zip(optimized, plain))


def test_render_lists_extended_instructions():
    text = render_adaptive(emit_method2([PauliObservable(p=3, n=2, x=(1, 1), z=(0, 0))]))
    assert text.startswith("qudits 4 dim 3\n")
    assert "MEASURE_ANC" in text
    assert "CCOMBINE sigma0" in text
