"""Dense univariate polynomials over an exact field.

Coefficients are stored lowest degree first in a tuple with no trailing
zeros; the zero polynomial is the empty tuple.  Any coefficient type that
supports ``+ - * /`` and comparison with ``0`` works (``int`` and
``Fraction`` for Q, ``CycloNum`` for Q(zeta_p), ``RatFun`` for nested
towers).  Python ints are promoted to ``Fraction`` only where an exact
division needs it.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np


def exact_div(a, b):
    """Field division that never falls back to float for int operands."""
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def _is_scalar(x) -> bool:
    return not isinstance(x, (Poly, np.ndarray, list, tuple))


class Poly:
    """Immutable dense polynomial; see module docstring for the layout."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Any] = ()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    # construction -----------------------------------------------------
    @classmethod
    def monomial(cls, n: int, c=1) -> "Poly":
        return cls([0] * n + [c])

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    def const(self, c) -> "Poly":
        return Poly((c,))

    def zero(self) -> "Poly":
        return Poly()

    def one(self) -> "Poly":
        return Poly((1,))

    # basic queries ----------------------------------------------------
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1]

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"({c})" + ("" if k == 0 else f"*x^{k}"))
        return "Poly(" + " + ".join(terms) + ")"

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if _is_scalar(other):
            if other == 0:
                return not self.coeffs
            return len(self.coeffs) == 1 and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # ring operations ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            if not _is_scalar(other):
                return NotImplemented
            other = Poly((other,))
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            if not _is_scalar(other):
                return NotImplemented
            other = Poly((other,))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return Poly()
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x == 0:
                    continue
                for j, y in enumerate(b):
                    out[i + j] = out[i + j] + x * y
            return Poly(out)
        if not _is_scalar(other):
            return NotImplemented
        if other == 0:
            return Poly()
        return Poly([c * other for c in self.coeffs])

    def __rmul__(self, other):
        if not _is_scalar(other):
            return NotImplemented
        if other == 0:
            return Poly()
        return Poly([other * c for c in self.coeffs])

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly((1,)), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def div_scalar(self, c) -> "Poly":
        return Poly([exact_div(x, c) for x in self.coeffs])

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db = other.degree()
        lead = other.lc()
        if len(r) - 1 < db:
            return Poly(), self
        qt = [0] * (len(r) - db)
        bc = other.coeffs
        for k in range(len(r) - 1 - db, -1, -1):
            c = exact_div(r[k + db], lead)
            qt[k] = c
            if c != 0:
                for j in range(db + 1):
                    r[k + j] = r[k + j] - c * bc[j]
        return Poly(qt), Poly(r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self.div_scalar(self.lc())

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def deriv(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def subs_power(self, k: int) -> "Poly":
        """f(x) -> f(x^k)."""
        if k <= 0:
            raise ValueError("power must be positive")
        if not self.coeffs:
            return self
        out = [0] * (k * self.degree() + 1)
        for i, c in enumerate(self.coeffs):
            out[k * i] = c
        return Poly(out)

    def scale_var(self, s) -> "Poly":
        """f(x) -> f(s*x)."""
        out, sk = [], 1
        for c in self.coeffs:
            out.append(c * sk)
            sk = sk * s
        return Poly(out)

    def map_coeffs(self, f) -> "Poly":
        return Poly([f(c) for c in self.coeffs])

    def compose(self, g: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc


def poly_gcd(a, b):
    """Monic gcd of two polynomials of the same kind; ``gcd(0, 0) == 0``."""
    return a.gcd(b)


def poly_xgcd(a: Poly, b: Poly):
    """Return ``(g, s, t)`` with ``s*a + t*b == g`` and ``g`` monic."""
    r0, r1 = a, b
    s0, s1 = Poly((1,)), Poly()
    t0, t1 = Poly(), Poly((1,))
    while not r1.is_zero():
        qt, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    if r0.is_zero():
        return r0, s0, t0
    lead = r0.lc()
    return r0.div_scalar(lead), s0.div_scalar(lead), t0.div_scalar(lead)


def QPoly(coeffs: Sequence) -> Poly:
    """Polynomial over Q with every coefficient promoted to ``Fraction``."""
    return Poly([Fraction(c) for c in coeffs])
