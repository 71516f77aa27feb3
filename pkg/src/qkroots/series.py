"""Power series in one variable z truncated at a fixed order D.

Coefficients live in any exact ring (``Fraction``, ``RatFun``, ``CycloNum``)
or in ``complex``.  Matrix series hold square numpy arrays (object dtype for
exact entries).  Truncation is never extended silently: binary operations
require equal orders.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import linalg
from .exact.poly import exact_div


class SeriesError(ValueError):
    pass


def _is_matrix(c) -> bool:
    return isinstance(c, np.ndarray)


def _zero_like(c):
    if _is_matrix(c):
        return linalg.zeros(c.shape[0], zero=0) if c.dtype == object else np.zeros_like(c)
    return 0


def _mul(a, b):
    if _is_matrix(a):
        return linalg.matmul(a, b) if a.dtype == object else a @ b
    return a * b


@dataclass(frozen=True)
class TruncSeries:
    """c_0 + c_1 z + ... + c_D z^D (scalar or matrix coefficients)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise SeriesError("series needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_matrix(self) -> bool:
        return _is_matrix(self.coeffs[0])

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def _check(self, other: "TruncSeries"):
        if self.order != other.order:
            raise SeriesError(f"order mismatch: {self.order} vs {other.order}")
        if self.is_matrix != other.is_matrix or (
            self.is_matrix and self.coeffs[0].shape != other.coeffs[0].shape
        ):
            raise SeriesError("dimension mismatch")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return TruncSeries(-a for a in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        return TruncSeries(a * other for a in self.coeffs)

    def __rmul__(self, other):
        return TruncSeries(other * a for a in self.coeffs)

    def map(self, f) -> "TruncSeries":
        """Apply ``f`` to every coefficient (entrywise for matrices)."""
        if self.is_matrix:
            return TruncSeries(linalg.apply(f, c) for c in self.coeffs)
        return TruncSeries(f(c) for c in self.coeffs)

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise SeriesError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[: order + 1])

    def evaluate(self, z):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc

    def is_zero(self) -> bool:
        if self.is_matrix:
            return all(linalg.is_zero_matrix(c) if c.dtype == object else not np.any(c) for c in self.coeffs)
        return all(c == 0 for c in self.coeffs)


def zero_series(order: int, like=0) -> TruncSeries:
    return TruncSeries([_zero_like(like)] * (order + 1))


def one_series(order: int, n: int | None = None, exact: bool = True) -> TruncSeries:
    if n is None:
        return TruncSeries([1] + [0] * order)
    one = linalg.identity(n) if exact else np.eye(n, dtype=complex)
    zero = linalg.zeros(n) if exact else np.zeros((n, n), dtype=complex)
    return TruncSeries([one] + [zero] * order)


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product truncated at the common order."""
    a._check(b)
    D = a.order
    out = []
    for n in range(D + 1):
        acc = _mul(a.coeffs[0], b.coeffs[n])
        for k in range(1, n + 1):
            acc = acc + _mul(a.coeffs[k], b.coeffs[n - k])
        out.append(acc)
    return TruncSeries(out)


def _const_inverse(c):
    if _is_matrix(c):
        if c.dtype == object:
            return linalg.inverse(c)
        return np.linalg.inv(c)
    if c == 0:
        raise ZeroDivisionError("constant term is not invertible")
    return exact_div(1, c)


def series_inverse(a: TruncSeries) -> TruncSeries:
    """Two-sided inverse; the constant term must be invertible."""
    try:
        c0inv = _const_inverse(a.coeffs[0])
    except (ZeroDivisionError, np.linalg.LinAlgError) as exc:
        raise SeriesError("constant term is not invertible") from exc
    out = [c0inv]
    for n in range(1, a.order + 1):
        acc = _mul(a.coeffs[1], out[n - 1])
        for k in range(2, n + 1):
            acc = acc + _mul(a.coeffs[k], out[n - k])
        out.append(-_mul(c0inv, acc))
    return TruncSeries(out)


def substitute_power(a: TruncSeries, p: int, order: int | None = None) -> TruncSeries:
    """z -> z^p, truncated at ``order`` (default: the input's order).

    The result is fully determined only when the input carries at least
    ``order // p`` coefficients; a shorter input raises.
    """
    if p <= 0:
        raise SeriesError("power must be positive")
    D = a.order if order is None else order
    if a.order < D // p:
        raise SeriesError(f"input order {a.order} too small for z^{p} at order {D}")
    zero = _zero_like(a.coeffs[0])
    out = [zero] * (D + 1)
    for k in range(D // p + 1):
        out[p * k] = a.coeffs[k]
    return TruncSeries(out)


def pochhammer_series(x_scale, order: int, q) -> TruncSeries:
    """Expansion of prod_{i>=0} (1 - x_scale z q^i) in z.

    Built from phi(z) = (1 - z) phi(q z): c_n = -x q^(n-1) c_(n-1) / (1 - q^n).
    """
    out = [1]
    qn = 1
    for n in range(1, order + 1):
        qprev = qn
        qn = qn * q
        den = 1 - qn
        if den == 0:
            raise SeriesError(f"1 - q^{n} vanishes; q is a root of unity of order dividing {n}")
        out.append(exact_div(-x_scale * qprev * out[-1], den))
    return TruncSeries(out)


def series_log(a: TruncSeries) -> TruncSeries:
    """log(a) for scalar a with constant term 1, via a'/a."""
    if a.is_matrix:
        raise SeriesError("log is implemented for scalar series only")
    if a.coeffs[0] != 1:
        raise SeriesError("log needs constant term 1")
    D = a.order
    # b = log a  =>  n b_n = n a_n - sum_{k=1}^{n-1} k b_k a_{n-k}
    b = [0] * (D + 1)
    for n in range(1, D + 1):
        acc = n * a.coeffs[n]
        for k in range(1, n):
            acc = acc - k * b[k] * a.coeffs[n - k]
        b[n] = exact_div(acc, n)
    return TruncSeries(b)


def series_exp(a: TruncSeries) -> TruncSeries:
    """exp(a) for scalar a with constant term 0."""
    if a.is_matrix:
        raise SeriesError("exp is implemented for scalar series only")
    if a.coeffs[0] != 0:
        raise SeriesError("exp needs constant term 0")
    D = a.order
    # e' = a' e  =>  n e_n = sum_{k=1}^n k a_k e_{n-k}
    e = [1] + [0] * D
    for n in range(1, D + 1):
        acc = 0
        for k in range(1, n + 1):
            acc = acc + k * a.coeffs[k] * e[n - k]
        e[n] = exact_div(acc, n)
    return TruncSeries(e)
