"""Small exact matrices as numpy object arrays over any field of objects."""
from __future__ import annotations

import itertools

import numpy as np

from .poly import Poly, exact_div


def obj_array(rows) -> np.ndarray:
    rows = [list(r) for r in rows]
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = v
    return out


def identity(n: int, one=1, zero=0) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = one if i == j else zero
    return out


def zeros(n: int, m: int | None = None, zero=0) -> np.ndarray:
    out = np.empty((n, n if m is None else m), dtype=object)
    out.fill(zero)
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, k = a.shape
    m = b.shape[1]
    out = np.empty((n, m), dtype=object)
    for i in range(n):
        for j in range(m):
            acc = a[i, 0] * b[0, j]
            for t in range(1, k):
                acc = acc + a[i, t] * b[t, j]
            out[i, j] = acc
    return out


def apply(f, a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = f(v)
    return out


def is_zero_matrix(a: np.ndarray) -> bool:
    return all(v == 0 for v in a.flat)


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination over a field; ``b`` may have several columns.

    Raises ``ZeroDivisionError`` when the system is singular.
    """
    n = a.shape[0]
    b2 = b.reshape(n, -1)
    m = np.concatenate([a.astype(object), b2.astype(object)], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r, col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
        pv = m[col, col]
        m[col, col:] = [exact_div(v, pv) for v in m[col, col:]]
        for r in range(n):
            if r != col and m[r, col] != 0:
                f = m[r, col]
                m[r, col:] = [x - f * y for x, y in zip(m[r, col:], m[col, col:])]
    x = m[:, n:]
    return x.reshape(b.shape)


def inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    one = 1
    return solve(a, identity(n, one, 0))


def det(a: np.ndarray):
    """Determinant by Laplace expansion; only ring operations are used."""
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    total = 0
    for j in range(n):
        if a[0, j] == 0:
            continue
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        term = a[0, j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def charpoly(a: np.ndarray) -> Poly:
    """det(T*I - a) as a ``Poly`` in T with coefficients in the entry ring."""
    n = a.shape[0]
    m = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), range(n)):
        m[i, j] = Poly((-a[i, j], 1)) if i == j else Poly((-a[i, j],))
    return det(m)


def trace(a: np.ndarray):
    acc = a[0, 0]
    for i in range(1, a.shape[0]):
        acc = acc + a[i, i]
    return acc
