# tests/test_crud_rom_results.py

import numpy as np
import pytest
from sqlalchemy.exc import IntegrityError

from core.crud_rom_results import (
    count_rom_results,
    create_rom_result,
    delete_rom_result,
    dense_coefficients,
    find_rom_result,
    get_all_rom_results,
    get_rom_result,
    sparse_coefficients,
)
from core.hybrid import magic_rom
from core.magic import MagicParams
from core.models import RomResultCreate


def _create(p: int = 3, copies: int = 1, solver: str = "highs", **overrides) -> RomResultCreate:
    data = dict(
        p=p,
        copies=copies,
        z=1,
        gamma=p - 1,
        eps=0,
        solver=solver,
        value=1.94098,
        residual=1e-12,
        state_count=12,
        coefficients={0: 1.5, 4: -0.5},
    )
    data.update(overrides)
    return RomResultCreate(**data)


def test_create_and_get(db_session):
    stored = create_rom_result(db_session, _create())
    assert stored.id is not None
    fetched = get_rom_result(db_session, stored.id)
    assert fetched.value == pytest.approx(1.94098)
    assert fetched.created_at is not None


def test_get_missing_returns_none(db_session):
    assert get_rom_result(db_session, 999) is None


def test_find_by_key(db_session):
    create_rom_result(db_session, _create())
    params = MagicParams.default(3)
    assert find_rom_result(db_session, 3, 1, params, "highs") is not None
    assert find_rom_result(db_session, 3, 1, params, "simplex") is None
    assert find_rom_result(db_session, 3, 2, params, "highs") is None


def test_duplicate_key_is_rejected(db_session):
    create_rom_result(db_session, _create())
    with pytest.raises(IntegrityError):
        create_rom_result(db_session, _create(value=2.0))
    assert count_rom_results(db_session) == 1


def test_list_count_and_filter(db_session):
    create_rom_result(db_session, _create())
    create_rom_result(db_session, _create(solver="simplex"))
    create_rom_result(db_session, _create(p=5, gamma=4, value=3.43607, state_count=30))
    assert count_rom_results(db_session) == 3
    assert count_rom_results(db_session, p=5) == 1
    assert len(get_all_rom_results(db_session, skip=0, limit=2)) == 2
    assert [r.p for r in get_all_rom_results(db_session, p=3)] == [3, 3]


def test_delete(db_session):
    stored = create_rom_result(db_session, _create())
    assert delete_rom_result(db_session, stored.id) is not None
    assert get_rom_result(db_session, stored.id) is None
    assert delete_rom_result(db_session, stored.id) is None


def test_coefficients_survive_storage(db_session):
    coefficients = np.zeros(12)
    coefficients[[1, 7]] = [1.25, -0.25]
    coefficients[3] = 1e-15
    sparse = sparse_coefficients(coefficients, 1e-10)
    assert sparse == {1: 1.25, 7: -0.25}
    stored = create_rom_result(db_session, _create(coefficients=sparse))
    restored = dense_coefficients(stored)
    np.testing.assert_array_equal(restored, np.where(np.abs(coefficients) > 1e-10, coefficients, 0.0))


def test_magic_rom_uses_cache(db_session):
    first, coefficients = magic_rom(3, 1, db=db_session)
    assert not first.cached
    assert count_rom_results(db_session) == 1
    second, cached_coefficients = magic_rom(3, 1, db=db_session)
    assert second.cached
    assert second.rom == pytest.approx(first.rom)
    assert second.support_size == first.support_size
    np.testing.assert_allclose(cached_coefficients[np.abs(coefficients) > 1e-10], coefficients[np.abs(coefficients) > 1e-10])
    assert count_rom_results(db_session) == 1


def test_magic_rom_without_database():
    summary, coefficients = magic_rom(3, 1)
    assert summary.rom == pytest.approx(1.94098, abs=1e-4)
    assert summary.params == (1, 2, 0)
    assert coefficients.shape == (12,)
