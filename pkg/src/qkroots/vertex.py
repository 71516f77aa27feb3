"""Dilogarithm, Yang-Yang function of T*Gr(k, n), and q -> 1 / q -> zeta_p
asymptotics of the scalar T*P^0 vertex Psi = phi(hbar z)/phi(z)."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels

PI2_6 = math.pi ** 2 / 6


class BranchCutError(ValueError):
    """An argument lies on the cut [1, inf) of the principal dilogarithm."""

    def __init__(self, w, index=None):
        where = "" if index is None else f" (monomial {index})"
        super().__init__(f"dilogarithm argument {w!r} on the branch cut [1, inf){where}")
        self.w = w
        self.index = index


@lru_cache(maxsize=None)
def _bernoulli_even(nterms: int) -> np.ndarray:
    """B_2, B_4, ..., B_{2 nterms} as floats (Akiyama-Tanigawa over Q)."""
    top = 2 * nterms
    row = [Fraction(0)] * (top + 1)
    out = []
    for m in range(top + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        if m >= 2 and m % 2 == 0:
            out.append(float(row[0]))
    return np.array(out)


_SERIES_TERMS = 60
_BERNOULLI_TERMS = 40


def _li2_unit_disc(w: complex) -> complex:
    # |w| <= 1, w != 1
    if abs(w) <= 0.5:
        return _kernels.li2_series(w, _SERIES_TERMS)
    if w.real <= 0.5:
        u = -cmath.log(1 - w)
        return _kernels.bernoulli_li2(u, _BERNOULLI_TERMS, _bernoulli_even(_BERNOULLI_TERMS))
    # reflection: 1 - w has real part < 1/2 and modulus < 1
    v = 1 - w
    return PI2_6 - cmath.log(w) * cmath.log(v) - _li2_unit_disc(v)


def dilog(w) -> complex:
    """Principal branch Li2(w) = sum w^m/m^2, continued off the unit disc.

    |w| <= 1/2: power series; otherwise inside the unit disc the Bernoulli
    series in u = -log(1-w) (after reflection when Re w > 1/2); |w| > 1:
    Li2(w) = -pi^2/6 - log^2(-w)/2 - Li2(1/w).
    """
    w = complex(w)
    if w == 0:
        return 0j
    if w == 1:
        return complex(PI2_6)
    if w.imag == 0 and w.real > 1:
        raise BranchCutError(w)
    if abs(w) > 1:
        lg = cmath.log(-w)
        return -PI2_6 - lg * lg / 2 - _li2_unit_disc(1 / w)
    return _li2_unit_disc(w)


# --- Yang-Yang function ------------------------------------------------------

@dataclass(frozen=True)
class MonomialWeight:
    """x^alpha a^beta hbar^gamma with integer exponent vectors."""

    x_exp: tuple
    a_exp: tuple
    hbar_exp: int = 0
    sign: int = 1

    def evaluate(self, x, a, hbar) -> complex:
        val = complex(hbar) ** self.hbar_exp
        for xi, e in zip(x, self.x_exp):
            if e:
                val *= complex(xi) ** e
        for ai, e in zip(a, self.a_exp):
            if e:
                val *= complex(ai) ** e
        return val

    @property
    def x_dependent(self) -> bool:
        return any(self.x_exp)


@dataclass(frozen=True)
class YangYangData:
    """T*Gr(k, n) with polarization P = sum x_i/a_j - sum x_i/x_j."""

    k: int
    n: int
    a: tuple
    hbar: complex
    z: complex
    sqrt_sign: int = 1

    def __post_init__(self):
        if not 0 < self.k <= self.n or len(self.a) != self.n:
            raise ValueError("need 0 < k <= n and n equivariant parameters")
        if self.sqrt_sign not in (1, -1):
            raise ValueError("sqrt_sign must be +1 or -1")

    @property
    def det_exponent(self) -> int:
        """Power of x_i in det P (the x_i/x_j part cancels)."""
        return self.n

    @property
    def z_sharp(self) -> complex:
        """z (-hbar^{1/2})^{-n}, principal square root times ``sqrt_sign``."""
        root = self.sqrt_sign * cmath.sqrt(complex(self.hbar))
        return complex(self.z) * (-root) ** (-self.det_exponent)

    def polarization(self) -> list[MonomialWeight]:
        k, n = self.k, self.n
        out = []
        for j in range(n):
            for i in range(k):
                xe = [0] * k
                xe[i] = 1
                ae = [0] * n
                ae[j] = -1
                out.append(MonomialWeight(tuple(xe), tuple(ae), 0, 1))
        for i in range(k):
            for j in range(k):
                xe = [0] * k
                xe[i] += 1
                xe[j] -= 1
                out.append(MonomialWeight(tuple(xe), (0,) * n, 0, -1))
        return out


def yang_yang(x, data: YangYangData) -> complex:
    """sum_{w in P} (Li2(w) - Li2(hbar w)) + log(z_#) log(prod x)."""
    x = [complex(v) for v in x]
    if len(x) != data.k:
        raise ValueError("need k Bethe variables")
    hbar = complex(data.hbar)
    total = 0j
    for idx, mono in enumerate(data.polarization()):
        w = mono.evaluate(x, data.a, hbar)
        try:
            total += mono.sign * (dilog(w) - dilog(hbar * w))
        except BranchCutError as exc:
            raise BranchCutError(exc.w, idx) from None
    total += cmath.log(data.z_sharp) * cmath.log(complex(np.prod(x)))
    return total


def gradient_check(x, data: YangYangData, h_step: float = 1e-5) -> float:
    """max_m |exp(x_m dY/dx_m) - 1| by central differences in log x_m.

    Exponentiation removes the 2 pi i ambiguity of the logarithms.
    Raises ``ValueError`` at the degenerate point z = 0, x_m = a_j.
    """
    x = [complex(v) for v in x]
    if data.z == 0:
        raise ValueError("z = 0: x sits on a logarithmic singularity; check skipped")
    worst = 0.0
    for m in range(len(x)):
        up = list(x)
        dn = list(x)
        up[m] = x[m] * cmath.exp(h_step)
        dn[m] = x[m] * cmath.exp(-h_step)
        deriv = (yang_yang(up, data) - yang_yang(dn, data)) / (2 * h_step)
        worst = max(worst, abs(cmath.exp(deriv) - 1))
    return worst


# --- scalar vertex asymptotics -------------------------------------------------

M_TERMS = 200


def qlog_psi(z, hbar, q, mmax: int = M_TERMS) -> complex:
    """log Psi for Psi = phi(hbar z)/phi(z): sum (z^m - (hbar z)^m)/(m (1 - q^m))."""
    z, hbar, q = complex(z), complex(hbar), complex(q)
    if abs(z) >= 1 or abs(hbar * z) >= 1:
        raise ValueError("m-sum diverges: need |z| < 1 and |hbar z| < 1")
    return _kernels.qlog_msum(z, hbar, q, mmax)


def _rel(a: complex, b: complex) -> float:
    if b == 0:
        return abs(a - b)
    return abs(a - b) / abs(b)


def scalar_vertex_asymptotics(hbar, z, p: int, eps: float, mmax: int = M_TERMS) -> dict:
    """Compare the scaled log of the scalar vertex with dilogarithm limits.

    (i)   (1-q) log Psi(z, hbar, q)              vs Li2(z) - Li2(hbar z),           q = 1 - eps
    (ii)  (1-q^p) p log Psi(z, hbar, q)          vs Li2(z^p) - Li2(hbar^p z^p),     q = zeta_p (1 - eps)
    (iii) (1-q^p) p log Psi(z^p, hbar^p, q^{p^2}) vs the same target,              q = zeta_p (1 - eps)
    """
    hbar, z = complex(hbar), complex(z)
    if abs(z) > 0.3 or abs(hbar * z) > 0.3:
        raise ValueError("parameters outside the series-dominated disc |z|, |hbar z| <= 0.3")
    zeta = cmath.exp(2j * math.pi / p)
    q1 = 1 - eps
    target1 = dilog(z) - dilog(hbar * z)
    val1 = (1 - q1) * qlog_psi(z, hbar, q1, mmax)
    qz = zeta * (1 - eps)
    target2 = dilog(z ** p) - dilog(hbar ** p * z ** p)
    val2 = (1 - qz ** p) * p * qlog_psi(z, hbar, qz, mmax)
    val3 = (1 - qz ** p) * p * qlog_psi(z ** p, hbar ** p, qz ** (p * p), mmax)
    return {
        "hbar": hbar,
        "z": z,
        "p": p,
        "eps": eps,
        "cases": {
            "q_to_1": {"value": val1, "target": target1, "rel_error": _rel(val1, target1)},
            "q_to_zeta": {"value": val2, "target": target2, "rel_error": _rel(val2, target2)},
            "powered_q_to_zeta": {"value": val3, "target": target2, "rel_error": _rel(val3, target2)},
        },
    }
