"""``Poly``-compatible wrapper around FLINT's ``fmpq_poly``.

Rational functions over Q(q) spend nearly all their time in gcds; FLINT
does these in C.  The wrapper exposes exactly the interface ``RatFun``
uses, with ``Fraction`` at the boundary, so the two classes are
interchangeable.  ``HAVE_FLINT`` is False when python-flint is missing and
callers fall back to the pure ``Poly``.
"""
from __future__ import annotations

from fractions import Fraction

from .poly import Poly

try:
    import flint

    HAVE_FLINT = True
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None
    HAVE_FLINT = False


def _to_fmpq(c):
    if isinstance(c, int):
        return flint.fmpq(c)
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    if isinstance(c, flint.fmpq):
        return c
    raise TypeError(f"cannot use {type(c).__name__} as a rational coefficient")


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _is_rational_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) or (HAVE_FLINT and isinstance(x, flint.fmpq))


class FlintQPoly:
    """Univariate polynomial over Q backed by ``flint.fmpq_poly``."""

    __slots__ = ("f",)

    def __init__(self, coeffs=(), _raw=None):
        if _raw is not None:
            self.f = _raw
        else:
            self.f = flint.fmpq_poly([_to_fmpq(c) for c in coeffs])

    @classmethod
    def _wrap(cls, f) -> "FlintQPoly":
        return cls(_raw=f)

    @classmethod
    def from_poly(cls, g: Poly) -> "FlintQPoly":
        return cls(g.coeffs)

    def to_poly(self) -> Poly:
        return Poly(self.coeffs)

    @classmethod
    def x(cls) -> "FlintQPoly":
        return cls((0, 1))

    def const(self, c) -> "FlintQPoly":
        return FlintQPoly((c,))

    def zero(self) -> "FlintQPoly":
        return FlintQPoly()

    def one(self) -> "FlintQPoly":
        return FlintQPoly((1,))

    @property
    def coeffs(self) -> tuple:
        return tuple(_to_fraction(c) for c in self.f.coeffs())

    def degree(self) -> int:
        return self.f.degree()

    def is_zero(self) -> bool:
        return self.f.is_zero()

    def lc(self) -> Fraction:
        return _to_fraction(self.f.leading_coefficient()) if not self.f.is_zero() else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return _to_fraction(self.f[k]) if 0 <= k <= self.f.degree() else Fraction(0)

    def __repr__(self):
        return f"FlintQPoly({self.f})"

    def __eq__(self, other):
        if isinstance(other, FlintQPoly):
            return self.f == other.f
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if _is_rational_scalar(other):
            return self.f == flint.fmpq_poly([_to_fmpq(other)])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return not self.f.is_zero()

    def _lift(self, other):
        if isinstance(other, FlintQPoly):
            return other.f
        if isinstance(other, Poly):
            return FlintQPoly.from_poly(other).f
        if _is_rational_scalar(other):
            return _to_fmpq(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else FlintQPoly._wrap(self.f + o)

    __radd__ = __add__

    def __neg__(self):
        return FlintQPoly._wrap(-self.f)

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else FlintQPoly._wrap(self.f - o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else FlintQPoly._wrap(o - self.f)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else FlintQPoly._wrap(self.f * o)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        return FlintQPoly._wrap(self.f ** n)

    def div_scalar(self, c) -> "FlintQPoly":
        return FlintQPoly._wrap(self.f / _to_fmpq(c))

    def __divmod__(self, other: "FlintQPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        qt, r = divmod(self.f, self._lift(other))
        return FlintQPoly._wrap(qt), FlintQPoly._wrap(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "FlintQPoly":
        if self.f.is_zero():
            return self
        return FlintQPoly._wrap(self.f / self.f.leading_coefficient())

    def gcd(self, other: "FlintQPoly") -> "FlintQPoly":
        # FLINT returns the monic gcd
        return FlintQPoly._wrap(self.f.gcd(self._lift(other)))

    def deriv(self) -> "FlintQPoly":
        return FlintQPoly._wrap(self.f.derivative())

    def __call__(self, x):
        if _is_rational_scalar(x):
            return _to_fraction(self.f(_to_fmpq(x)))
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def subs_power(self, k: int) -> "FlintQPoly":
        if k <= 0:
            raise ValueError("power must be positive")
        if self.f.is_zero():
            return self
        cs = self.f.coeffs()
        out = [flint.fmpq(0)] * (k * (len(cs) - 1) + 1)
        for i, c in enumerate(cs):
            out[k * i] = c
        return FlintQPoly._wrap(flint.fmpq_poly(out))

    def scale_var(self, s) -> "FlintQPoly":
        s = _to_fmpq(s)
        out, sk = [], flint.fmpq(1)
        for c in self.f.coeffs():
            out.append(c * sk)
            sk = sk * s
        return FlintQPoly._wrap(flint.fmpq_poly(out))

    def map_coeffs(self, f) -> Poly:
        # the image may leave Q, so the result is a pure Poly
        return Poly([f(c) for c in self.coeffs])
