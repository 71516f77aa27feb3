"""p-adic valuations and the truncated ring Q[pi]/(pi^(p-1) + p) for matrices."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .primes import require_prime


def padic_valuation(r, p: int):
    """Exponent of p in the rational ``r``; ``math.inf`` when r == 0."""
    r = Fraction(r)
    if r == 0:
        return math.inf
    v = 0
    n, d = abs(r.numerator), r.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _obj(a) -> np.ndarray:
    out = np.empty(np.shape(a), dtype=object)
    for idx, v in np.ndenumerate(np.asarray(a, dtype=object)):
        out[idx] = Fraction(v)
    return out


class PiAdicMat:
    """Square-matrix polynomial sum_k C_k pi^k with pi^(p-1) = -p.

    ``digits`` holds C_0..C_{p-2} as exact object arrays; the relation keeps
    every element in that range.  ``pi_valuation`` measures an element in
    units of pi, where an entry c of digit k contributes k + (p-1) v_p(c).
    """

    __slots__ = ("p", "digits")

    def __init__(self, digits, p: int):
        require_prime(p)
        self.p = p
        digits = [_obj(d) for d in digits]
        n = digits[0].shape[0]
        while len(digits) < p - 1:
            digits.append(_obj(np.zeros((n, n), dtype=int)))
        # fold any higher digits with pi^(p-1) = -p
        while len(digits) > p - 1:
            top = len(digits) - 1
            d = digits.pop()
            digits[top - (p - 1)] = digits[top - (p - 1)] - p * d
        self.digits = tuple(digits)

    @classmethod
    def from_terms(cls, terms: dict, n: int, p: int) -> "PiAdicMat":
        """Build from ``{pi_power: matrix}``; powers may exceed p-2."""
        top = max(terms) if terms else 0
        digits = [np.zeros((n, n), dtype=int)] * (top + 1)
        digits = [_obj(d) for d in digits]
        for k, m in terms.items():
            digits[k] = digits[k] + _obj(m)
        return cls(digits, p)

    @classmethod
    def identity(cls, n: int, p: int) -> "PiAdicMat":
        return cls([np.eye(n, dtype=int)], p)

    @property
    def size(self) -> int:
        return self.digits[0].shape[0]

    def __add__(self, other: "PiAdicMat") -> "PiAdicMat":
        return PiAdicMat([a + b for a, b in zip(self.digits, other.digits)], self.p)

    def __sub__(self, other: "PiAdicMat") -> "PiAdicMat":
        return PiAdicMat([a - b for a, b in zip(self.digits, other.digits)], self.p)

    def __mul__(self, other: "PiAdicMat") -> "PiAdicMat":
        p = self.p
        n = self.size
        acc = [_obj(np.zeros((n, n), dtype=int)) for _ in range(2 * (p - 1) - 1)]
        for i, a in enumerate(self.digits):
            for j, b in enumerate(other.digits):
                acc[i + j] = acc[i + j] + a.dot(b)
        return PiAdicMat(acc, p)

    def __pow__(self, k: int) -> "PiAdicMat":
        result = PiAdicMat.identity(self.size, self.p)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        return all(np.array_equal(a, b) for a, b in zip(self.digits, other.digits))

    def pi_valuation(self):
        """Minimum pi-adic valuation over all digit entries (inf for zero)."""
        best = math.inf
        for k, d in enumerate(self.digits):
            for c in d.flat:
                if c != 0:
                    best = min(best, k + (self.p - 1) * padic_valuation(c, self.p))
        return best

    def valuation_table(self):
        """Per-(digit, row, col) valuations of nonzero entries."""
        out = []
        for k, d in enumerate(self.digits):
            for (i, j), c in np.ndenumerate(d):
                if c != 0:
                    out.append((k, i, j, k + (self.p - 1) * padic_valuation(c, self.p)))
        return out
