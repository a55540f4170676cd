# tests/test_pauli.py

import numpy as np
import pytest

from core.exceptions import InverseOfZero, InvalidModulusError, OracleTooLarge, ShapeError
from core.field import FieldElem, fp_inv, inv_mod, validate_prime
from core.pauli import (
    PauliObservable,
    apply_pauli_to_vector,
    commutation_phase,
    dense_matrix,
    pauli_mul,
    pauli_pow,
    random_pauli,
    roots_of_unity,
    scaled_observable,
    symplectic_form,
)


def X(p, n=1, wire=0, power=1):
    return PauliObservable.single(p, n, wire, x=power)


def Z(p, n=1, wire=0, power=1):
    return PauliObservable.single(p, n, wire, z=power)


# --- F_p ---


@pytest.mark.parametrize("p, a, expected", [(3, 2, 2), (5, 2, 3), (7, 4, 2)])
def test_inv_mod_examples(p, a, expected):
    assert inv_mod(a, p) == expected
    assert fp_inv(FieldElem.of(a, p)).value == expected


def test_inverse_of_zero_raises():
    with pytest.raises(InverseOfZero, match="modulo 5"):
        inv_mod(10, 5)


@pytest.mark.parametrize("p", [2, 4, 9, 1, 103])
def test_unsupported_modulus_raises(p):
    with pytest.raises(InvalidModulusError):
        validate_prime(p)


def test_field_arithmetic_reduces():
    a = FieldElem.of(4, 5)
    assert (a + 3).value == 2
    assert (a * a).value == 1
    assert (-a).value == 1
    assert (a / 2).value == 2
    assert (a ** -1).value == 4


# --- Pauli algebra ---


def test_z_times_x_picks_up_phase():
    result = pauli_mul(Z(3), X(3))
    assert (result.lam, result.x, result.z) == (1, (1,), (1,))


def test_identity_is_neutral():
    P = PauliObservable(p=5, n=2, lam=3, x=(1, 4), z=(2, 0))
    assert pauli_mul(PauliObservable.identity(5, 2), P) == P


def test_exponents_add_mod_p():
    result = pauli_mul(X(5, power=2), X(5, power=4))
    assert (result.lam, result.x, result.z) == (0, (1,), (0,))


def test_power_of_xz():
    XZ = PauliObservable(p=5, n=1, x=(1,), z=(1,))
    result = pauli_pow(XZ, 2)
    assert (result.lam, result.x, result.z) == (1, (2,), (2,))


def test_pth_power_is_identity():
    assert pauli_pow(Z(3), 3).is_identity()
    assert pauli_pow(Z(3), 0) == PauliObservable.identity(3, 1)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_x_z_commutation_phase(p):
    assert symplectic_form(X(p), Z(p)) == p - 1
    assert commutation_phase(X(p), Z(p)).phi == p - 1
    assert commutation_phase(Z(p, 2, 0), Z(p, 2, 1)).commutes


def test_self_commutation():
    XZ = PauliObservable(p=3, n=1, x=(1,), z=(1,))
    assert symplectic_form(XZ, XZ) == 0


def test_mismatched_operands_raise():
    with pytest.raises(ShapeError, match="disagree"):
        pauli_mul(X(3, 1), X(3, 2))
    with pytest.raises(ShapeError):
        PauliObservable(p=3, n=2, x=(1,), z=(0, 0))


def test_phase_alias_and_reduction():
    P = PauliObservable.model_validate({"p": 3, "n": 1, "lambda": 7, "x": [4], "z": [-1]})
    assert (P.lam, P.x, P.z) == (1, (1,), (2,))


# --- Dense matrices ---


def test_dense_z_is_diagonal_of_roots():
    omega = roots_of_unity(3)
    np.testing.assert_allclose(dense_matrix(Z(3)), np.diag([1, omega[1], omega[2]]))


def test_dense_x_shifts_basis():
    matrix = dense_matrix(X(3))
    for j in range(3):
        basis = np.zeros(3)
        basis[j] = 1
        assert np.argmax(np.abs(matrix @ basis)) == (j + 1) % 3


def test_dense_identity():
    np.testing.assert_allclose(dense_matrix(PauliObservable.identity(3, 2)), np.eye(9))


@pytest.mark.parametrize("p", [3, 5])
def test_symbolic_product_matches_dense(p):
    rng = np.random.default_rng(11)
    for _ in range(20):
        P = random_pauli(p, 2, rng)
        Q = random_pauli(p, 2, rng)
        np.testing.assert_allclose(
            dense_matrix(pauli_mul(P, Q)), dense_matrix(P) @ dense_matrix(Q), atol=1e-9
        )
        k = int(rng.integers(0, 2 * p))
        np.testing.assert_allclose(
            dense_matrix(pauli_pow(P, k)), np.linalg.matrix_power(dense_matrix(P), k), atol=1e-9
        )
        phi = symplectic_form(P, Q)
        omega = roots_of_unity(p)
        np.testing.assert_allclose(
            dense_matrix(P) @ dense_matrix(Q),
            omega[phi] * dense_matrix(Q) @ dense_matrix(P),
            atol=1e-9,
        )


def test_apply_to_vector_matches_dense():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=27) + 1j * rng.normal(size=27)
    for _ in range(10):
        P = random_pauli(3, 3, rng)
        np.testing.assert_allclose(apply_pauli_to_vector(P, psi), dense_matrix(P) @ psi, atol=1e-9)


def test_scaled_observable_drops_power_phase():
    P = PauliObservable(p=5, n=2, lam=1, x=(4, 0), z=(0, 3))
    scaled = scaled_observable(P, 4)
    assert (scaled.lam, scaled.x, scaled.z) == (4, (1, 0), (0, 2))


def test_dense_matrix_respects_oracle_limit(monkeypatch):
    monkeypatch.setenv("QPBC_ORACLE_LIMIT", "100")
    with pytest.raises(OracleTooLarge, match="exceeds the configured limit 100"):
        dense_matrix(PauliObservable.identity(5, 3))
