# core/lp.py
"""l1-minimization linear programs: min sum|c| subject to A c = b.

The split c = c+ - c- turns the problem into a standard-form LP. Two solvers
are available: scipy's HiGHS dual simplex, and a dense two-phase simplex with
Bland's rule for small problems and environments without HiGHS.
"""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import sparse
from scipy.linalg import qr
from scipy.optimize import linprog

from . import constants, settings
from .exceptions import NumericalFailure

logger = logging.getLogger(__name__)


class LpSolution(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    coefficients: np.ndarray
    objective: float
    residual: float
    solver: str
    iterations: int = 0


# --- Dense simplex ---


def independent_rows(A: np.ndarray, tol: float = constants.PIVOT_TOLERANCE) -> np.ndarray:
    """Indices of a maximal set of linearly independent rows of A."""
    if A.shape[0] == 0:
        return np.arange(0)
    _, r, perm = qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0:
        return np.arange(0)
    rank = int(np.sum(diag > tol * diag[0]))
    return np.sort(perm[:rank])


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _run_phase(tableau: np.ndarray, basis: list[int], n_cols: int, tol: float) -> int:
    """Minimize the objective in the last row over the first n_cols columns with Bland's rule."""
    m = tableau.shape[0] - 1
    for iteration in range(constants.SIMPLEX_MAX_ITERATIONS):
        costs = tableau[-1, :n_cols]
        entering = next((j for j in range(n_cols) if costs[j] < -tol), None)
        if entering is None:
            return iteration
        column = tableau[:m, entering]
        ratios = [
            (tableau[i, -1] / column[i], basis[i], i) for i in range(m) if column[i] > tol
        ]
        if not ratios:
            raise NumericalFailure("linear program is unbounded")
        best = min(r[0] for r in ratios)
        leaving = min((r for r in ratios if r[0] <= best + tol), key=lambda r: r[1])[2]
        _pivot(tableau, leaving, entering)
        basis[leaving] = entering
    raise NumericalFailure(
        f"simplex did not converge in {constants.SIMPLEX_MAX_ITERATIONS} iterations"
    )


def simplex_min(c: np.ndarray, A: np.ndarray, b: np.ndarray, tol: float = constants.LP_OPTIMALITY_TOLERANCE):
    """min c.x subject to A x = b, x >= 0; returns (x, iterations)."""
    keep = independent_rows(A)
    A = A[keep]
    b = b[keep].astype(float)
    m, n = A.shape
    signs = np.where(b < 0, -1.0, 1.0)
    A = A * signs[:, None]
    b = b * signs

    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = A
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[-1, :n] = -A.sum(axis=0)
    tableau[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    iterations = _run_phase(tableau, basis, n + m, tol)
    if -tableau[-1, -1] > constants.LP_RESIDUAL_WARNING:
        raise NumericalFailure(f"linear program is infeasible (phase one value {-tableau[-1, -1]:.3g})")

    # drive remaining artificials out of the basis
    for i, var in enumerate(basis):
        if var >= n:
            col = next((j for j in range(n) if abs(tableau[i, j]) > tol), None)
            if col is not None:
                _pivot(tableau, i, col)
                basis[i] = col

    tableau[-1, :] = 0.0
    tableau[-1, :n] = c
    for i, var in enumerate(basis):
        if var < n and c[var] != 0:
            tableau[-1] -= c[var] * tableau[i]
    tableau[-1, n : n + m] = 0.0
    iterations += _run_phase(tableau, basis, n, tol)

    x = np.zeros(n)
    for i, var in enumerate(basis):
        if var < n:
            x[var] = tableau[i, -1]
    return x, iterations


# --- l1 minimization ---


def _polish(A, b: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    """Least-squares refit on the support; kept only if it lowers the residual without raising the l1 norm."""
    support = np.flatnonzero(np.abs(coefficients) > constants.COEFFICIENT_PRUNE_THRESHOLD)
    if support.size == 0:
        return coefficients
    dense = A[:, support].toarray() if sparse.issparse(A) else A[:, support]
    refit, *_ = np.linalg.lstsq(dense, b, rcond=None)
    before = np.linalg.norm(dense @ coefficients[support] - b)
    after = np.linalg.norm(dense @ refit - b)
    if after < before and np.abs(refit).sum() <= np.abs(coefficients).sum() + constants.LP_RESIDUAL_WARNING:
        polished = np.zeros_like(coefficients)
        polished[support] = refit
        return polished
    return coefficients


def minimize_l1(A, b: np.ndarray, solver: Optional[str] = None) -> LpSolution:
    """min ||c||_1 subject to A c = b for real A (dense or scipy sparse)."""
    solver = solver or settings.lp_solver()
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    if sparse.issparse(A):
        split = sparse.hstack([A, -A]).tocsc()
    else:
        split = np.hstack([A, -A])
    cost = np.ones(2 * n)

    if solver == "highs":
        result = linprog(cost, A_eq=split, b_eq=b, bounds=(0, None), method="highs-ds")
        if result.status != 0:
            logger.error(f"HiGHS failed: status={result.status}, message={result.message}")
            raise NumericalFailure(f"HiGHS status {result.status}: {result.message}")
        values = result.x
        iterations = int(getattr(result, "nit", 0) or 0)
    elif solver == "simplex":
        dense = split.toarray() if sparse.issparse(split) else split
        values, iterations = simplex_min(cost, dense, b)
    else:
        raise NumericalFailure(f"unknown LP solver '{solver}'")

    coefficients = values[:n] - values[n:]
    coefficients = _polish(A, b, coefficients)
    residual = float(np.max(np.abs(A @ coefficients - b))) if b.size else 0.0
    if residual > constants.LP_RESIDUAL_WARNING:
        logger.warning(f"l1 solution residual {residual:.3g} exceeds {constants.LP_RESIDUAL_WARNING}")
    objective = float(np.abs(coefficients).sum())
    logger.debug(f"l1 minimization ({solver}): {n} columns, objective {objective:.6f}")
    return LpSolution(
        coefficients=coefficients,
        objective=objective,
        residual=residual,
        solver=solver,
        iterations=iterations,
    )
