"""The cyclotomic field Q(zeta_p) for a prime p.

An element is its residue modulo Phi_p(x) = 1 + x + ... + x^(p-1), stored
as p-1 rational coordinates in the power basis 1, zeta, ..., zeta^(p-2).
The uniformiser lambda = zeta - 1 generates the prime above p.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

from .fp import PrimeFieldElem
from .padic import padic_valuation
from .poly import Poly, poly_xgcd
from .primes import require_prime


def cyclotomic_poly(p: int) -> Poly:
    """Phi_p = 1 + q + ... + q^(p-1) over Q."""
    require_prime(p)
    return Poly([Fraction(1)] * p)


class CycloNum:
    __slots__ = ("p", "rep")

    def __init__(self, rep, p: int, _clean: bool = False):
        self.p = p
        if _clean:
            self.rep = tuple(rep)
            return
        self.rep = _reduce([Fraction(c) for c in rep], p)

    # constructors -------------------------------------------------------
    @classmethod
    def zeta(cls, p: int, k: int = 1) -> "CycloNum":
        """zeta_p^k."""
        require_prime(p)
        v = [Fraction(0)] * p
        v[k % p] = Fraction(1)
        return cls(v, p)

    @classmethod
    def from_scalar(cls, c, p: int) -> "CycloNum":
        v = [Fraction(0)] * (p - 1)
        v[0] = Fraction(c)
        return cls(v, p, _clean=True)

    @classmethod
    def from_poly(cls, f: Poly, p: int) -> "CycloNum":
        return cls(list(f.coeffs), p)

    @classmethod
    def uniformizer(cls, p: int) -> "CycloNum":
        return cls.zeta(p) - 1

    def to_poly(self) -> Poly:
        return Poly(self.rep)

    # queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.rep)

    def is_rational(self) -> bool:
        return not any(self.rep[1:])

    def __repr__(self):
        terms = [f"{c}*z^{k}" if k else f"{c}" for k, c in enumerate(self.rep) if c]
        return f"CycloNum[{self.p}](" + (" + ".join(terms) or "0") + ")"

    def _coerce(self, other):
        if isinstance(other, CycloNum):
            if other.p != self.p:
                raise ValueError("mixing different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNum.from_scalar(other, self.p)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self.rep == o.rep

    def __hash__(self):
        return hash((self.rep, self.p))

    def __bool__(self):
        return not self.is_zero()

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloNum(tuple(a + b for a, b in zip(self.rep, o.rep)), self.p, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(tuple(-a for a in self.rep), self.p, _clean=True)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNum(tuple(a * other for a in self.rep), self.p, _clean=True)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.p
        acc = [0] * p
        for i, a in enumerate(self.rep):
            if a == 0:
                continue
            for j, b in enumerate(o.rep):
                if b:
                    acc[(i + j) % p] += a * b
        return CycloNum(_fold(acc, p), p, _clean=True)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        """Inverse by extended Euclid against Phi_p."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0 in Q(zeta_p)")
        if self.is_rational():
            return CycloNum.from_scalar(1 / self.rep[0], self.p)
        g, s, _ = poly_xgcd(Poly(self.rep), cyclotomic_poly(self.p))
        if g.degree() != 0:  # pragma: no cover - Phi_p is irreducible
            raise ZeroDivisionError("element not invertible mod Phi_p")
        return CycloNum.from_poly(s, self.p)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNum(tuple(a / other for a in self.rep), self.p, _clean=True)
        o = self._coerce(other)
        return NotImplemented if o is None else self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycloNum.from_scalar(1, self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # Galois action and embeddings -------------------------------------------
    def galois(self, k: int) -> "CycloNum":
        """Image under zeta -> zeta^k (k prime to p)."""
        if k % self.p == 0:
            raise ValueError("k must be prime to p")
        acc = [Fraction(0)] * self.p
        for i, a in enumerate(self.rep):
            acc[(i * k) % self.p] += a
        return CycloNum(_fold(acc, self.p), self.p, _clean=True)

    def to_complex(self, k: int = 1) -> complex:
        """Embedding sending zeta to exp(2 pi i k / p)."""
        w = cmath.exp(2j * math.pi * k / self.p)
        acc = 0j
        for c in reversed(self.rep):
            acc = acc * w + float(c)
        return acc

    def norm(self) -> Fraction:
        """Field norm to Q (product of all conjugates)."""
        acc = CycloNum.from_scalar(1, self.p)
        for k in range(1, self.p):
            acc = acc * self.galois(k)
        return acc.rep[0]

    def reduce_mod_lambda(self) -> PrimeFieldElem:
        """The residue in F_p under zeta -> 1; requires p-integral coordinates."""
        for c in self.rep:
            if c and padic_valuation(c, self.p) < 0:
                raise ValueError("element is not integral at lambda; cannot reduce")
        return PrimeFieldElem(sum(self.rep, Fraction(0)), self.p)


def _fold(acc, p):
    # element of Q[x]/(x^p - 1) -> residue mod Phi_p
    top = acc[p - 1]
    if top:
        return tuple(Fraction(a - top) for a in acc[: p - 1])
    return tuple(Fraction(a) for a in acc[: p - 1])


def _reduce(coeffs, p):
    # arbitrary-length coefficient list -> residue mod Phi_p
    acc = [Fraction(0)] * p
    for i, c in enumerate(coeffs):
        acc[i % p] += c
    return _fold(acc, p)


def lambda_valuation(x: CycloNum) -> float:
    """Valuation of ``x`` normalised so that v(zeta_p - 1) = 1.

    Returns ``math.inf`` for zero.
    """
    if x.is_zero():
        return math.inf
    p = x.p
    m = min(padic_valuation(c, p) for c in x.rep if c)
    y = x * Fraction(p) ** (-m)
    v = m * (p - 1)
    lam_inv = CycloNum.uniformizer(p).inverse()
    while True:
        s = sum(y.rep, Fraction(0))
        if s == 0 or padic_valuation(s, p) > 0:
            y = y * lam_inv
            v += 1
        else:
            return v


def divide_by_lambda_power(x: CycloNum, k: int) -> CycloNum:
    return x * CycloNum.uniformizer(x.p) ** (-k)
