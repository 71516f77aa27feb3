"""Reduced quotients of polynomials (``Poly`` or ``FpPoly``).

Every result is normalised eagerly: ``gcd(num, den) == 1`` and ``den`` is
monic.  Zero-detection and the Phi_p certificate both rely on that.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .flintpoly import HAVE_FLINT, FlintQPoly
from .fp import FpPoly, PrimeFieldElem
from .poly import Poly, exact_div


def _is_coeff(x) -> bool:
    # scalars that live in the coefficient field of the polynomials
    return not isinstance(x, (RatFun, Poly, FpPoly, FlintQPoly, np.ndarray, list, tuple))


class RatFun:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduced: bool = False):
        if den is None:
            den = num.one()
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            if num.is_zero():
                den = den.one()
            else:
                g = num.gcd(den)
                if g.degree() > 0:
                    num = num // g
                    den = den // g
            lead = den.lc()
            if lead != 1:
                num = num.div_scalar(lead)
                den = den.div_scalar(lead)
        self.num = num
        self.den = den

    # constructors -------------------------------------------------------
    @classmethod
    def variable(cls, like=None, p: int | None = None) -> "RatFun":
        """The generator ``x`` over Q (default) or over F_p."""
        if p is not None:
            return cls(FpPoly.x(p), reduced=True)
        return cls(Poly((0, 1)), Poly((1,)), reduced=True)

    @classmethod
    def constant(cls, c, p: int | None = None) -> "RatFun":
        if p is not None:
            return cls(FpPoly([0], p).const(c), FpPoly([1], p), reduced=True)
        return cls(Poly((c,)), Poly((1,)), reduced=True)

    def _wrap(self, c) -> "RatFun":
        return RatFun(self.num.const(c), self.den.one(), reduced=True)

    def _lift(self, other):
        if isinstance(other, RatFun):
            return other
        if _is_coeff(other):
            if isinstance(self.num, FpPoly) and isinstance(other, PrimeFieldElem):
                other = other.value
            return self._wrap(other)
        return None

    # queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.den.degree() == 0:
            return f"RatFun({self.num})"
        return f"RatFun({self.num} / {self.den})"

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFun(self.num + o.num, self.den)
        g = self.den.gcd(o.den)
        if g.degree() == 0:
            return RatFun(self.num * o.den + o.num * self.den, self.den * o.den, reduced=True)
        b1 = self.den // g
        d1 = o.den // g
        return RatFun(self.num * d1 + o.num * b1, self.den * d1)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, reduced=True)

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
        if self.is_zero() or o.is_zero():
            return RatFun(self.num.zero(), self.den.one(), reduced=True)
        # cross-cancel keeps operands small
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num // g1, o.den // g1) if g1.degree() > 0 else (self.num, o.den)
        n2, d1 = (o.num // g2, self.den // g2) if g2.degree() > 0 else (o.num, self.den)
        num = n1 * n2
        den = d1 * d2
        lead = den.lc()
        if lead != 1:
            num, den = num.div_scalar(lead), den.div_scalar(lead)
        return RatFun(num, den, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFun(self.num**n, self.den**n, reduced=True)

    # calculus and substitutions ---------------------------------------------
    def deriv(self) -> "RatFun":
        return RatFun(self.num.deriv() * self.den - self.num * self.den.deriv(), self.den * self.den)

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError("evaluation at a pole")
        n = self.num(x)
        if isinstance(self.num, FpPoly):
            return PrimeFieldElem(n, self.num.p) / d if isinstance(n, int) else n / d
        return exact_div(n, d)

    def subs_power(self, k: int) -> "RatFun":
        """x -> x^k (coprimality and monicity are preserved)."""
        return RatFun(self.num.subs_power(k), self.den.subs_power(k), reduced=True)

    def scale_var(self, s) -> "RatFun":
        return RatFun(self.num.scale_var(s), self.den.scale_var(s))

    def map_coeffs(self, f) -> "RatFun":
        return RatFun(self.num.map_coeffs(f), self.den.map_coeffs(f))

    def taylor(self, order: int) -> list:
        """Coefficients c_0..c_order of the expansion at 0 (needs den(0) != 0)."""
        dc = self.den.coeffs
        nc = self.num.coeffs
        d0 = dc[0] if dc else 0
        if d0 == 0:
            raise ZeroDivisionError("rational function has a pole at 0")
        out = []
        for n in range(order + 1):
            acc = nc[n] if n < len(nc) else 0
            for k in range(1, min(n, len(dc) - 1) + 1):
                acc = acc - dc[k] * out[n - k]
            out.append(exact_div(acc, d0) if not isinstance(self.num, FpPoly) else (acc * pow(int(d0), -1, self.num.p)) % self.num.p)
        return out


def qpoly_class():
    """Polynomial class used for Q(q): FLINT-backed when available."""
    return FlintQPoly if HAVE_FLINT else Poly


def ratfun_q(num_coeffs, den_coeffs=(1,)) -> RatFun:
    """Element of Q(q) from integer/rational coefficient lists."""
    P = qpoly_class()
    return RatFun(P([Fraction(c) for c in num_coeffs]), P([Fraction(c) for c in den_coeffs]))


def q_variable() -> RatFun:
    """The generator q of Q(q) on the fastest available backend."""
    return ratfun_q((0, 1))
