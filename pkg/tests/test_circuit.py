# tests/test_circuit.py

import numpy as np
import pytest

from core.circuit import (
    CircuitIR,
    Correction,
    FinalMeasure,
    Measure,
    MidMeasure,
    UvGate,
    gadgetize,
    parse,
    random_circuit,
    render,
)
from core.exceptions import NotMagic, ParseError
from core.gates import CliffordGate, GateKind
from core.magic import MagicParams, magic_state_vector, uv_exponent_vector
from core.pauli import roots_of_unity

ONE_T_GATE = "qudits 1 dim 3\nUV 0 1 2 0\nMEASURE 0\n"


# --- Parsing ---


def test_parse_clifford_and_measure():
    ir = parse("qudits 1 dim 3\nF 0\nMEASURE 0")
    assert (ir.p, ir.n, ir.t) == (3, 1, 0)
    assert ir.gates == [CliffordGate(kind=GateKind.F, target=0), Measure(target=0)]


def test_parse_uv_gate():
    ir = parse(ONE_T_GATE)
    assert ir.gates[0] == UvGate(target=0, z=1, gamma=2, eps=0)
    assert ir.t == 1
    assert ir.measured_qudits == [0]


def test_parse_ignores_comments_and_blank_lines():
    ir = parse("# header comment\n\nqudits 2 dim 5  # two ququints\nSUM 0 1 3\nX 1 7\n")
    assert ir.gates == [
        CliffordGate(kind=GateKind.SUM, control=0, target=1, power=3),
        CliffordGate(kind=GateKind.X, target=1, power=2),
    ]


@pytest.mark.parametrize(
    "text, line, column, fragment",
    [
        ("qudits 1 dim 4\n", 1, 14, "not a supported odd prime"),
        ("qudits 1 dim 3\nH 0\n", 2, 1, "Unknown mnemonic 'H'"),
        ("qudits 2 dim 3\nF 2\n", 2, 3, "out of range"),
        ("qudits 1 dim 3\nUV 0 1 0 0\n", 2, 8, "gamma' must be nonzero"),
        ("qudits 1 dim 3\nMEASURE 0\nF 0\n", 3, 3, "used after MEASURE"),
        ("qudits 2 dim 3\nSUM 1 1\n", 2, 7, "must differ"),
        ("qudits 1 dim 3\nF zero\n", 2, 3, "Expected integer"),
        ("F 0\n", 1, 1, "Expected header"),
    ],
)
def test_parse_errors_carry_location(text, line, column, fragment):
    with pytest.raises(ParseError, match=fragment) as excinfo:
        parse(text)
    assert excinfo.value.location() == {"line": line, "column": column}


def test_empty_text_is_missing_header():
    with pytest.raises(ParseError, match="Missing header"):
        parse("")


def test_render_round_trips_through_parse():
    text = "qudits 2 dim 3\nF 0\nSUM 0 1 2\nUV 1 1 2 0\nZ 0 2\nMEASURE 1\n"
    ir = parse(text)
    assert parse(render(ir)) == ir


# --- Magic gates ---


def test_qutrit_exponent_vector():
    assert uv_exponent_vector(3, 1, 2, 0) == (0, 1, 8)


def test_ququint_exponent_vector():
    assert uv_exponent_vector(5, 1, 4, 0) == (0, 3, 4, 2, 1)


def test_exponent_vector_starts_at_zero():
    assert uv_exponent_vector(3, 0, 1, 0)[0] == 0
    assert uv_exponent_vector(7, 3, 5, 2)[0] == 0


def test_gamma_zero_is_not_magic():
    with pytest.raises(NotMagic, match="gamma'=0"):
        MagicParams(p=5, z=1, gamma=5, eps=0)


def test_qutrit_magic_state():
    zeta = roots_of_unity(9)
    np.testing.assert_allclose(
        magic_state_vector(3, 1, 2, 0), np.array([1, zeta[1], zeta[8]]) / np.sqrt(3)
    )


def test_ququint_magic_state():
    omega = roots_of_unity(5)
    np.testing.assert_allclose(
        magic_state_vector(5, 1, 4, 0), omega[[0, 3, 4, 2, 1]] / np.sqrt(5)
    )


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_magic_states_are_normalized(p):
    rng = np.random.default_rng(p)
    for _ in range(5):
        z, eps = rng.integers(0, p, size=2)
        gamma = int(rng.integers(1, p))
        assert np.linalg.norm(magic_state_vector(p, int(z), gamma, int(eps))) == pytest.approx(1.0)


def test_default_params():
    assert MagicParams.default(3).as_tuple() == (1, 2, 0)
    assert MagicParams.default(5).as_tuple() == (1, 4, 0)


# --- Gadgetization ---


def test_gadgetize_clifford_circuit_keeps_gates():
    ir = parse("qudits 2 dim 3\nF 0\nSUM 0 1\nMEASURE 1\n")
    gc = gadgetize(ir)
    assert (gc.n_data, gc.n_magic, gc.wires) == (2, 0, 2)
    assert gc.elements[:2] == ir.gates[:2]
    assert gc.elements[2] == FinalMeasure(wire=1, logical=1)


def test_gadgetize_single_uv():
    gc = gadgetize(parse(ONE_T_GATE))
    assert gc.wires == 2
    assert gc.elements == [
        CliffordGate(kind=GateKind.F, target=0, power=2),
        CliffordGate(kind=GateKind.SUM, control=1, target=0),
        MidMeasure(wire=0, id=0),
        Correction(wire=1, id=0, z=1, gamma=2, eps=0),
        FinalMeasure(wire=1, logical=0),
    ]
    assert gc.final_wire_map == [1]
    assert gc.magic_params == [MagicParams(p=3, z=1, gamma=2, eps=0)]


def test_gadgetize_three_uv_gates():
    ir = parse("qudits 2 dim 3\nUV 0 1 2 0\nF 0\nUV 0 0 1 1\nSUM 0 1\nUV 1 1 2 0\nMEASURE 0\nMEASURE 1\n")
    gc = gadgetize(ir)
    assert gc.n_magic == 3
    assert gc.wires == 5
    assert len(gc.mid_measure_positions()) == 3
    assert sum(isinstance(e, Correction) for e in gc.elements) == 3
    assert gc.final_wire_map == [3, 4]
    # the SUM between the second and third gadget acts on the relabelled wires
    assert CliffordGate(kind=GateKind.SUM, control=3, target=1) in gc.elements


def test_random_circuit_shape():
    ir = random_circuit(5, 3, 2, 2, 10, np.random.default_rng(0))
    assert isinstance(ir, CircuitIR)
    assert ir.t == 2
    assert len(ir.measured_qudits) == 2
    assert len(ir.gates) == 14
