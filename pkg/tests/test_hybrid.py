# tests/test_hybrid.py

import math

import numpy as np
import pytest

from core import settings
from core.backends import DenseBackend
from core.compiler import PbcSession, replay_program
from core.exceptions import InvalidInputDataError, ShapeError
from core.hybrid import (
    decompose_magic,
    draw_eta_sample,
    eta,
    exact_q0,
    half_width,
    hybrid_estimate,
    plan_samples,
    random_program,
)
from core.magic import MagicParams

QUTRIT_ROM = 1.94098


def _program(seed: int, t: int = 2, length: int = 3):
    return random_program(3, t, length, np.random.default_rng(seed))


@pytest.fixture(scope="module")
def qutrit_decompositions(tmp_path_factory):
    with pytest.MonkeyPatch.context() as mp:
        mp.setenv(settings.CACHE_DIR_ENV, str(tmp_path_factory.mktemp("cache")))
        yield {k: decompose_magic(3, k) for k in range(3)}


# --- Estimator and sample planning ---


@pytest.mark.parametrize(
    "m, sign, l1, p, expected",
    [
        (0, 1, 1.0, 3, 1.0),
        (1, 1, 1.0, 3, 0.0),
        (2, -1, 2.0, 3, 1.0),
        (0, -1, 2.0, 3, -1.0),
        (3, 1, 1.0, 5, 0.0),
    ],
)
def test_eta_values(m, sign, l1, p, expected):
    assert eta(m, sign, l1, p) == pytest.approx(expected)


def test_plan_samples_for_one_virtual_qutrit():
    assert plan_samples(0.1, 0.05, QUTRIT_ROM, 3) == 1236


def test_plan_samples_scales_with_l1_squared():
    single = plan_samples(0.01, 0.05, QUTRIT_ROM, 3)
    double = plan_samples(0.01, 0.05, 2 * QUTRIT_ROM, 3)
    assert double / single == pytest.approx(4.0, rel=1e-3)


def test_conservative_plan_is_larger():
    assert plan_samples(0.05, 0.05, 3.44194, 3, conservative=True) > plan_samples(0.05, 0.05, 3.44194, 3)


@pytest.mark.parametrize("accuracy, q", [(0.1, 0.05), (0.02, 0.01), (0.3, 0.2)])
def test_planned_samples_meet_accuracy(accuracy, q):
    N = plan_samples(accuracy, q, QUTRIT_ROM, 3)
    assert half_width(N, q, QUTRIT_ROM, 3) <= accuracy * (1 + 1e-12)
    assert half_width(N - 1, q, QUTRIT_ROM, 3) > accuracy or N == 1


def test_half_width_without_samples_is_infinite():
    assert math.isinf(half_width(0, 0.05, QUTRIT_ROM, 3))


@pytest.mark.parametrize("accuracy, q", [(0, 0.05), (-0.1, 0.05), (0.1, 0), (0.1, 1)])
def test_plan_samples_rejects_bad_arguments(accuracy, q):
    with pytest.raises(InvalidInputDataError):
        plan_samples(accuracy, q, QUTRIT_ROM, 3)


# --- Decomposition ---


def test_no_virtual_qudits_is_trivial():
    decomposition = decompose_magic(3, 0)
    assert decomposition.l1 == 1.0
    assert decomposition.preparations == [[]]


def test_single_qutrit_decomposition():
    decomposition = decompose_magic(3, 1)
    assert decomposition.l1 == pytest.approx(QUTRIT_ROM, abs=1e-4)
    assert decomposition.weights.sum() == pytest.approx(1.0)
    assert decomposition.coefficients.sum() == pytest.approx(1.0, abs=1e-6)
    assert len(decomposition.preparations) == len(decomposition.coefficients)
    assert set(decomposition.signs) <= {-1.0, 1.0}


def test_two_qutrit_decomposition():
    decomposition = decompose_magic(3, 2)
    assert decomposition.l1 == pytest.approx(3.44194, abs=1e-4)
    assert decomposition.residual < 1e-6


def test_decomposition_rejects_negative_k():
    with pytest.raises(InvalidInputDataError, match="non-negative"):
        decompose_magic(3, -1)


def test_cached_decomposition_reads_back(db_session):
    first = decompose_magic(3, 1, mode="cached", db=db_session)
    second = decompose_magic(3, 1, mode="cached", db=db_session)
    assert not first.cached
    assert second.cached
    assert second.l1 == pytest.approx(first.l1, abs=1e-9)
    assert second.state_indices == first.state_indices


# --- Estimation ---


@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("seed", [1, 2])
def test_exact_mode_is_unbiased(k, seed):
    program = _program(seed)
    report = hybrid_estimate(program, 2, k, 0, np.random.default_rng(0), mode="exact")
    assert report.N == 0
    assert report.q0_hat == pytest.approx(exact_q0(program, 3, 2), abs=1e-9)


def test_exact_mode_with_nondefault_magic_state():
    params = MagicParams(p=3, z=2, gamma=1, eps=1)
    program = _program(7)
    decomposition = decompose_magic(3, 1, params=params)
    report = hybrid_estimate(program, 2, 1, 0, np.random.default_rng(0), decomposition=decomposition, mode="exact")
    assert report.q0_hat == pytest.approx(exact_q0(program, 3, 2, params), abs=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_exact_mode_is_unbiased_on_random_programs(seed, qutrit_decompositions):
    rng = np.random.default_rng(300 + seed)
    t = int(rng.integers(1, 4))
    k = int(rng.integers(0, min(t, 2) + 1))
    program = random_program(3, t, t + 2, rng)
    report = hybrid_estimate(program, t, k, 0, rng, decomposition=qutrit_decompositions[k], mode="exact")
    assert abs(report.q0_hat - exact_q0(program, 3, t)) <= 1e-9


def test_tabulated_mode_is_within_accuracy():
    program = _program(3)
    samples = plan_samples(0.05, 0.05, QUTRIT_ROM, 3)
    report = hybrid_estimate(program, 2, 1, samples, np.random.default_rng(11), mode="tabulated")
    assert report.N == samples
    assert report.half_width <= 0.05 * (1 + 1e-12)
    assert report.q0_hat == pytest.approx(exact_q0(program, 3, 2), abs=0.1)


@pytest.mark.slow
def test_planned_samples_land_within_accuracy_in_repeated_trials(qutrit_decompositions):
    program = _program(12)
    decomposition = qutrit_decompositions[1]
    samples = plan_samples(0.05, 0.05, decomposition.l1, 3)
    q0 = exact_q0(program, 3, 2)
    hits = 0
    for trial_rng in np.random.default_rng(2024).spawn(200):
        report = hybrid_estimate(program, 2, 1, samples, trial_rng, decomposition=decomposition, mode="tabulated")
        hits += abs(report.q0_hat - q0) <= 0.05
    assert hits >= 190



def test_session_mode_with_threads_is_reproducible():
    program = _program(4)
    decomposition = decompose_magic(3, 1)
    runs = [
        hybrid_estimate(program, 2, 1, 60, np.random.default_rng(5), decomposition=decomposition, workers=2)
        for _ in range(2)
    ]
    assert runs[0].q0_hat == runs[1].q0_hat
    assert runs[0].N == 60
    r = decomposition.l1 * 2 / 3
    assert 1 / 3 - r - 1e-9 <= runs[0].q0_hat <= 1 / 3 + r + 1e-9


def test_without_virtual_qudits_samples_are_indicators():
    program = _program(6)
    decomposition = decompose_magic(3, 0)
    rng = np.random.default_rng(2)
    for _ in range(20):
        sample = draw_eta_sample(program, decomposition, 2, rng)
        assert sample.eta == pytest.approx(1.0 if sample.m == 0 else 0.0)


def test_reduced_program_fits_remaining_magic_qudits():
    decomposition = decompose_magic(3, 1)
    program = _program(8, t=3, length=5)
    params = MagicParams.default(3)
    for j, prefix in enumerate(decomposition.preparations):
        session = PbcSession(3, 1, 2, DenseBackend(3, [params, params]), np.random.default_rng(j))
        outcomes = replay_program(program, session, prefix)
        assert len(outcomes) == 5
        assert session.backend.measurements <= 2


# --- Input validation ---


def test_more_virtual_than_magic_qudits():
    with pytest.raises(InvalidInputDataError, match="between 0 and t=2"):
        hybrid_estimate(_program(1), 2, 3, 10, np.random.default_rng(0))


def test_sampling_modes_need_samples():
    decomposition = decompose_magic(3, 0)
    with pytest.raises(InvalidInputDataError, match="at least one sample"):
        hybrid_estimate(_program(1), 2, 0, 0, np.random.default_rng(0), decomposition=decomposition)


def test_unknown_mode():
    decomposition = decompose_magic(3, 0)
    with pytest.raises(InvalidInputDataError, match="mode must be"):
        hybrid_estimate(_program(1), 2, 0, 5, np.random.default_rng(0), decomposition=decomposition, mode="bogus")


def test_empty_program():
    with pytest.raises(InvalidInputDataError, match="at least one measurement"):
        hybrid_estimate([], 2, 0, 5, np.random.default_rng(0))


def test_decomposition_must_match_k():
    with pytest.raises(ShapeError, match="estimate needs k=1"):
        hybrid_estimate(_program(1), 2, 1, 5, np.random.default_rng(0), decomposition=decompose_magic(3, 0))
