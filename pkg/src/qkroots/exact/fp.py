"""Prime fields and polynomials over them.

``FpPoly`` stores an int64 coefficient array and routes multiplication,
division and gcd through the compiled kernels in ``qkroots._kernels``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .. import _kernels as K
from .primes import require_prime


class PrimeFieldElem:
    """Element of F_p; ``value`` is kept in ``[0, p)``."""

    __slots__ = ("p", "value")

    def __init__(self, value, p: int):
        self.p = p
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ZeroDivisionError(f"{value} has a pole at p={p}")
            value = value.numerator * pow(value.denominator, -1, p)
        self.value = int(value) % p

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElem):
            if other.p != self.p:
                raise ValueError("mixing different prime fields")
            return other.value
        if isinstance(other, (int, Fraction)):
            return PrimeFieldElem(other, self.p).value
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else PrimeFieldElem(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else PrimeFieldElem(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else PrimeFieldElem(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else PrimeFieldElem(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElem(-self.value, self.p)

    def inverse(self) -> "PrimeFieldElem":
        if self.value == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return PrimeFieldElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * PrimeFieldElem(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeFieldElem(o, self.p) * self.inverse()

    def __pow__(self, n: int):
        return PrimeFieldElem(pow(self.value, n, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self.value == o

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def _arr(values, p: int) -> np.ndarray:
    a = np.asarray(values, dtype=np.int64) % p
    n = a.shape[0]
    # trailing zeros are few, so a scalar scan beats flatnonzero here
    while n and not a[n - 1]:
        n -= 1
    return a[:n]


class FpPoly:
    """Polynomial over F_p; same duck-typed interface as ``Poly``."""

    __slots__ = ("c", "p")

    def __init__(self, coeffs, p: int, _clean: bool = False):
        self.p = p
        self.c = coeffs if _clean else _arr(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, p)

    @classmethod
    def x(cls, p: int) -> "FpPoly":
        return cls([0, 1], p)

    def const(self, c) -> "FpPoly":
        if isinstance(c, Fraction):
            c = PrimeFieldElem(c, self.p).value
        return FpPoly([int(c)], self.p)

    def zero(self):
        return FpPoly([], self.p)

    def one(self):
        return FpPoly([1], self.p)

    @property
    def coeffs(self) -> tuple:
        return tuple(int(v) for v in self.c)

    def degree(self) -> int:
        return self.c.shape[0] - 1

    def is_zero(self) -> bool:
        return self.c.shape[0] == 0

    def lc(self) -> int:
        return int(self.c[-1])

    def coeff(self, k: int) -> int:
        return int(self.c[k]) if 0 <= k < self.c.shape[0] else 0

    def __repr__(self):
        return f"FpPoly({list(self.coeffs)}, p={self.p})"

    def __eq__(self, other):
        if isinstance(other, FpPoly):
            return self.p == other.p and np.array_equal(self.c, other.c)
        if isinstance(other, (int, Fraction, PrimeFieldElem)):
            return self == self.const(int(other) if isinstance(other, PrimeFieldElem) else other)
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.p))

    def __bool__(self):
        return not self.is_zero()

    def _lift(self, other):
        if isinstance(other, FpPoly):
            return other
        if isinstance(other, PrimeFieldElem):
            return self.const(other.value)
        if isinstance(other, (int, Fraction, np.integer)):
            return self.const(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.c, o.c
        if a.shape[0] < b.shape[0]:
            a, b = b, a
        out = a.copy()
        out[: b.shape[0]] += b
        return FpPoly(out, self.p)

    __radd__ = __add__

    def __neg__(self):
        return FpPoly((-self.c) % self.p, self.p, _clean=True)

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return FpPoly(K.fp_mul(self.c, o.c, self.p), self.p, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result, base = self.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def div_scalar(self, c) -> "FpPoly":
        inv = pow(int(PrimeFieldElem(c, self.p).value), -1, self.p)
        return FpPoly(self.c * inv, self.p)

    def __divmod__(self, other: "FpPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        qt, r = K.fp_divmod(self.c, other.c, self.p)
        return FpPoly(qt, self.p, _clean=True), FpPoly(r, self.p, _clean=True)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "FpPoly":
        return FpPoly(K.fp_monic(self.c, self.p), self.p, _clean=True)

    def gcd(self, other: "FpPoly") -> "FpPoly":
        return FpPoly(K.fp_gcd(self.c, other.c, self.p), self.p, _clean=True)

    def deriv(self) -> "FpPoly":
        if self.c.shape[0] <= 1:
            return self.zero()
        k = np.arange(1, self.c.shape[0], dtype=np.int64)
        return FpPoly(self.c[1:] * k, self.p)

    def __call__(self, x):
        acc = 0
        for v in reversed(self.coeffs):
            acc = acc * x + v
        if isinstance(acc, int):
            return acc % self.p
        return acc

    def subs_power(self, k: int) -> "FpPoly":
        if self.is_zero():
            return self
        out = np.zeros(k * self.degree() + 1, dtype=np.int64)
        out[::k] = self.c
        return FpPoly(out, self.p, _clean=True)

    def scale_var(self, s) -> "FpPoly":
        s = PrimeFieldElem(s, self.p).value
        powers = np.array([pow(s, i, self.p) for i in range(self.c.shape[0])], dtype=np.int64)
        return FpPoly(self.c * powers, self.p)

    def map_coeffs(self, f) -> "FpPoly":
        return FpPoly([int(f(v)) for v in self.coeffs], self.p)
