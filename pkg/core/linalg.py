# core/linalg.py
"""Gaussian elimination over F_p on small integer matrices."""

from typing import Optional

import numpy as np

from .field import inv_mod


def row_reduce(matrix, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of matrix mod p and the pivot columns."""
    m = np.array(matrix, dtype=np.int64) % p
    if m.ndim != 2:
        m = m.reshape(1, -1) if m.size else np.zeros((0, 0), dtype=np.int64)
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.nonzero(m[r:, c])[0]
        if nonzero.size == 0:
            continue
        pivot_row = r + int(nonzero[0])
        if pivot_row != r:
            m[[r, pivot_row]] = m[[pivot_row, r]]
        m[r] = (m[r] * inv_mod(int(m[r, c]), p)) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank_mod_p(matrix, p: int) -> int:
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    return len(row_reduce(matrix, p)[1])


def solve_mod_p(a, b, p: int) -> Optional[np.ndarray]:
    """One solution x of a x = b over F_p, or None when the system is inconsistent."""
    a = np.array(a, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64).reshape(-1) % p
    rows, cols = a.shape
    if cols == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    augmented = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    reduced, pivots = row_reduce(augmented, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = reduced[r, cols]
    return x


def nullspace_mod_p(a, p: int) -> np.ndarray:
    """Basis (as rows) of {w : a w = 0} over F_p."""
    a = np.array(a, dtype=np.int64) % p
    if a.ndim == 1:
        a = a.reshape(1, -1)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    reduced, pivots = row_reduce(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        w = np.zeros(cols, dtype=np.int64)
        w[f] = 1
        for r, c in enumerate(pivots):
            w[c] = (-reduced[r, f]) % p
        basis.append(w)
    if not basis:
        return np.zeros((0, cols), dtype=np.int64)
    return np.array(basis, dtype=np.int64)
