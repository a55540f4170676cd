# tests/test_monotones.py

import math

import numpy as np
import pytest

from core.circuit import random_circuit
from core.constants import REFERENCE_ROM
from core.exceptions import EnumerationTooLarge, InvalidInputDataError, NormalizationError, ShapeError
from core.lp import minimize_l1
from core.magic import MagicParams, magic_tensor_power
from core.monotones import (
    bound_report,
    pauli_expectations,
    reconstruct_expectations,
    renyi_entropy,
    rom,
    st_norm,
)
from core.stabilizer_states import (
    enumerate_stabilizer_states,
    load_stabilizer_basis,
    stabilizer_count,
)
from core.statevector import DenseState, apply_gates


def _magic_density(p: int, copies: int = 1) -> np.ndarray:
    psi = magic_tensor_power(MagicParams.default(p), copies)
    return np.outer(psi, psi.conj())


def _zero(p: int, n: int = 1) -> np.ndarray:
    psi = np.zeros(p**n, dtype=complex)
    psi[0] = 1
    return psi


# --- Stabilizer states ---


@pytest.mark.parametrize("p, n, expected", [(3, 1, 12), (3, 2, 360), (5, 1, 30), (3, 3, 30240)])
def test_stabilizer_count(p, n, expected):
    assert stabilizer_count(p, n) == expected


@pytest.mark.parametrize("p, n", [(3, 1), (5, 1), (3, 2)])
def test_enumeration_matches_count(p, n):
    states = enumerate_stabilizer_states(p, n)
    assert len(states) == stabilizer_count(p, n)
    assert len(set(states)) == len(states)


def test_enumeration_limit():
    with pytest.raises(EnumerationTooLarge):
        enumerate_stabilizer_states(3, 2, limit=100)
    with pytest.raises(EnumerationTooLarge):
        load_stabilizer_basis(3, 2, limit=100)


def test_basis_is_cached_on_disk(stabilizer_cache_dir):
    first = load_stabilizer_basis(3, 1)
    assert any(stabilizer_cache_dir.iterdir())
    second = load_stabilizer_basis(3, 1)
    np.testing.assert_array_equal(first.index, second.index)
    np.testing.assert_array_equal(first.exponent, second.exponent)


def test_basis_expectations_match_tableau_states():
    basis = load_stabilizer_basis(3, 1, use_cache=False)
    for j in range(basis.count):
        tableau = basis.tableau(j)
        for g in tableau.generators:
            assert tableau.stabilizes(g)
        assert basis.expectations(j)[0] == pytest.approx(1.0)


# --- l1 minimization ---


@pytest.mark.parametrize("solver", ["highs", "simplex"])
def test_minimize_l1_small_system(solver):
    A = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    solution = minimize_l1(A, np.array([2.0, 1.0]), solver)
    assert solution.objective == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(solution.coefficients, [0.0, 1.0, 0.0], atol=1e-9)
    assert solution.residual < 1e-9


# --- Robustness of magic ---


def test_pauli_expectations_of_zero_state():
    values = pauli_expectations(_zero(3), 3)
    np.testing.assert_allclose(values[:3], np.ones(3), atol=1e-12)
    np.testing.assert_allclose(values[3:], 0, atol=1e-12)


@pytest.mark.parametrize("p, copies", [(3, 1), (3, 2), (5, 1)])
def test_rom_of_magic_states(p, copies):
    result = rom(_magic_density(p, copies), p)
    assert result.value == pytest.approx(REFERENCE_ROM[(p, copies)], abs=1e-4)
    assert result.residual < 1e-6


def test_rom_solvers_agree():
    rho = _magic_density(3)
    assert rom(rho, 3, solver="simplex").value == pytest.approx(rom(rho, 3, solver="highs").value, abs=1e-6)


def test_rom_coefficients_reconstruct_state():
    rho = _magic_density(3)
    result = rom(rho, 3)
    basis = load_stabilizer_basis(3, 1)
    np.testing.assert_allclose(reconstruct_expectations(basis, result.coefficients), pauli_expectations(rho, 3), atol=1e-6)
    assert np.abs(result.coefficients).sum() == pytest.approx(result.value, abs=1e-9)


@pytest.mark.parametrize("p, n", [(3, 1), (5, 1), (3, 2)])
def test_rom_is_one_on_stabilizer_states(p, n):
    assert rom(_zero(p, n), p).value == pytest.approx(1.0, abs=1e-6)


def test_rom_is_submultiplicative():
    single = rom(_magic_density(3), 3).value
    double = rom(_magic_density(3, 2), 3).value
    assert double <= single**2 + 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("p, copies", [(3, 3), (5, 2)])
def test_rom_of_larger_products(p, copies):
    single = rom(_magic_density(p), p).value
    result = rom(_magic_density(p, copies), p)
    assert 1.0 < result.value <= single**copies + 1e-6
    assert result.value == pytest.approx(REFERENCE_ROM[(p, copies)], abs=1e-3)


def test_rom_rejects_bad_input():
    with pytest.raises(NormalizationError):
        rom(2 * _magic_density(3), 3)
    with pytest.raises(ShapeError, match="not a power of 3"):
        rom(np.eye(4) / 4, 3)
    basis = load_stabilizer_basis(3, 1)
    with pytest.raises(ShapeError, match="Stabilizer basis"):
        rom(_magic_density(3, 2), 3, basis=basis)


# --- Stabilizer norm and entropies ---


@pytest.mark.parametrize("p, expected", [(3, 1.48803), (5, 1.98885)])
def test_st_norm_of_magic_states(p, expected):
    assert st_norm(_magic_density(p), p) == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("p", [3, 5])
def test_st_norm_lower_bounds_rom(p):
    rho = _magic_density(p)
    assert st_norm(rho, p) <= rom(rho, p).value + 1e-9


def test_st_norm_of_stabilizer_state():
    psi = _zero(3, 2)
    assert st_norm(np.outer(psi, psi.conj()), 3) == pytest.approx(1.0)


@pytest.mark.parametrize("p, expected", [(3, 0.7236), (5, 0.8544)])
def test_renyi_half_of_magic_states(p, expected):
    psi = magic_tensor_power(MagicParams.default(p), 1)
    closed_form = 2 * math.log((1 + (p - 1) * math.sqrt(p)) / p, p)
    value = renyi_entropy(psi, 0.5, p)
    assert value == pytest.approx(closed_form, abs=1e-9)
    assert value == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("p, n", [(3, 2), (5, 1)])
def test_renyi_vanishes_on_enumerated_stabilizer_states(p, n):
    states = enumerate_stabilizer_states(p, n)
    rng = np.random.default_rng(p * 10 + n)
    for i in rng.choice(len(states), size=min(100, len(states)), replace=False):
        psi = states[int(i)].vector()
        for alpha in (0, 0.5, 2):
            assert renyi_entropy(psi, alpha, p) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("alpha", [0.5, 2])
def test_renyi_is_positive_on_magic_states(p, alpha):
    assert renyi_entropy(magic_tensor_power(MagicParams.default(p), 1), alpha, p) > 1e-3


@pytest.mark.parametrize("p", [3, 5])
def test_renyi_is_stable_under_cliffords(p):
    psi = magic_tensor_power(MagicParams.default(p), 2)
    state = DenseState.from_vector(p, psi)
    rng = np.random.default_rng(70 + p)
    for _ in range(5):
        gates = random_circuit(p, 2, 0, 0, 20, rng).gates
        rotated = apply_gates(state, gates).amplitudes
        for alpha in (0.5, 2):
            assert renyi_entropy(rotated, alpha, p) == pytest.approx(renyi_entropy(psi, alpha, p), abs=1e-9)


@pytest.mark.parametrize("alpha", [0, 0.5, 2])
def test_renyi_vanishes_on_stabilizer_states(alpha):
    assert renyi_entropy(_zero(3, 2), alpha, 3) == pytest.approx(0.0, abs=1e-9)


def test_renyi_is_additive():
    params = MagicParams.default(3)
    single = renyi_entropy(magic_tensor_power(params, 1), 2, 3)
    assert renyi_entropy(magic_tensor_power(params, 2), 2, 3) == pytest.approx(2 * single, abs=1e-9)


def test_renyi_rejects_alpha_one():
    with pytest.raises(InvalidInputDataError, match="different from 1"):
        renyi_entropy(_zero(3), 1, 3)


# --- Bounds ---


def test_bound_report_for_two_qutrit_copies():
    report = bound_report(3, 2)
    assert report.rom == pytest.approx(3.44194, abs=1e-4)
    assert report.rom_root == pytest.approx(report.rom, rel=1e-12)
    assert report.rom_upper_exponent == pytest.approx(math.log(3.44194, 3), abs=1e-4)
    assert report.renyi_lower_exponent == pytest.approx(0.7235, abs=1e-3)
    assert report.renyi_lower_exponent <= report.rom_upper_exponent


def test_bound_report_reuses_supplied_rom():
    report = bound_report(5, 1, rom_value=3.43607)
    assert report.rom_upper_exponent == pytest.approx(2 * math.log(3.43607, 5))
    assert report.st_norm == pytest.approx(1.98885, abs=1e-4)


def test_bound_report_needs_a_copy():
    with pytest.raises(InvalidInputDataError, match="at least one copy"):
        bound_report(3, 0)
