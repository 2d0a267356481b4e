"""Dense linear algebra for the small square systems of the Newton step.

Systems here are (n-m) x (n-m) with at most a few dozen unknowns, so a
plain LU factorization with partial pivoting is both adequate and easy to
reason about.  Rank deficiency is detected against a pivot threshold tied
to the matrix magnitude rather than to machine zero.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, IndexOutOfRangeError, SingularMatrixError

# Pivots below PIVOT_RTOL * max-row-sum(|A|) are treated as rank deficiency.
PIVOT_RTOL = 1e-14


def inf_norm(v) -> float:
    """Maximum absolute entry of ``v``; 0.0 for an empty vector."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v)))


def basis_vector(j: int, n: int) -> np.ndarray:
    """Canonical basis vector with a 1 at 1-based position ``j``."""
    if not 1 <= j <= n:
        raise IndexOutOfRangeError(f"basis index {j} outside 1..{n}")
    e = np.zeros(n)
    e[j - 1] = 1.0
    return e


def lu_solve(a, b) -> np.ndarray:
    """Solve ``A x = b`` by LU with partial pivoting.

    Raises :class:`SingularMatrixError` when a pivot, after row exchange,
    falls below ``PIVOT_RTOL`` times the infinity norm of ``A``.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    k = a.shape[0]
    if b.shape != (k,):
        raise DimensionMismatchError(f"right-hand side has shape {b.shape}, expected ({k},)")

    anorm = float(np.max(np.sum(np.abs(a), axis=1))) if k else 0.0
    if k and anorm == 0.0:
        raise SingularMatrixError("zero matrix")
    tol = PIVOT_RTOL * anorm

    for col in range(k):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) < tol:
            raise SingularMatrixError(f"pivot {a[piv, col]:.3e} below threshold {tol:.3e}")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        inv = 1.0 / a[col, col]
        for row in range(col + 1, k):
            factor = a[row, col] * inv
            if factor != 0.0:
                a[row, col + 1 :] -= factor * a[col, col + 1 :]
                b[row] -= factor * b[col]

    x = np.zeros(k)
    for row in range(k - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x
