"""Frobenius intertwiner F = Psi(z, a, q) G^{-1} Psi(z^p, a^p, q^{p^2})^{-1} at q = zeta_p.

The powered equation has classical part L' = L(a^p, hbar^p), while
iterating the original equation p times produces L^p.  The two are
conjugate but not equal in the stable basis of T*P^1, so the powered
solution is compared in the frame where its classical part is L^p: G is the
unit lower-triangular matrix with G L^p G^{-1} = L'.  For T*P^0, G = 1.
``gauge="none"`` drops G and reproduces the naive ratio.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import linalg
from .exact.cyclo import CycloNum, cyclotomic_poly
from .exact.primes import require_prime
from .exact.ratfun import RatFun
from .qde import QDEModel, build_model, expand_M, qde_iterate, iterated_product, solve_fundamental
from .series import (
    TruncSeries,
    series_exp,
    series_inverse,
    series_mul,
    substitute_power,
)

GAUGES = ("frobenius", "none")


class CertificateError(ArithmeticError):
    pass


def _unit_lower_eigenbasis(T: np.ndarray) -> np.ndarray:
    """Unit lower-triangular V with T V = V diag(T) for lower-triangular T
    with distinct diagonal entries."""
    n = T.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if T[i, j] != 0:
                raise ValueError("matrix is not lower triangular")
    V = linalg.identity(n)
    for j in range(n):
        lam = T[j, j]
        for i in range(j + 1, n):
            # row i of (T - lam) v = 0 determines v_i from v_j..v_{i-1}
            acc = 0
            for k in range(j, i):
                acc = acc + T[i, k] * V[k, j]
            gap = lam - T[i, i]
            if gap == 0:
                raise ValueError("repeated eigenvalue; gauge is not unique")
            V[i, j] = acc / gap
    return V


def frobenius_gauge(model: QDEModel, p: int) -> np.ndarray:
    """G with G L^p G^{-1} = L(a^p, hbar^p), unit lower triangular."""
    L = model.L
    Lp = L
    for _ in range(p - 1):
        Lp = linalg.matmul(Lp, L)
    Lpow = model.powered(p).L
    V = _unit_lower_eigenbasis(Lp)
    W = _unit_lower_eigenbasis(Lpow)
    return linalg.matmul(W, linalg.inverse(V))


def _as_exact_matrix(a: np.ndarray, like) -> np.ndarray:
    return linalg.apply(lambda e: e * like, a)


@dataclass(frozen=True)
class IntertwinerSeries:
    F: TruncSeries
    p: int
    order: int
    model: QDEModel
    gauge: str = "frobenius"
    q_power: int = 0
    reduced: bool = False
    psi: TruncSeries | None = field(default=None, compare=False)


def compute_intertwiner(model: QDEModel, p: int, D: int | None = None, *, gauge: str = "frobenius",
                        q_power: int | None = None) -> IntertwinerSeries:
    """F over Q(q) to order D (default 2p).

    The powered factor is solved at (a^p, hbar^p) to order D // p, then
    q -> q^{q_power} (default p^2) and z -> z^p are substituted.
    """
    require_prime(p)
    if gauge not in GAUGES:
        raise ValueError(f"gauge must be one of {GAUGES}")
    D = 2 * p if D is None else D
    qp = p * p if q_power is None else q_power
    sol = solve_fundamental(model, D)
    powered = solve_fundamental(model.powered(p), D // p)
    raised = TruncSeries(linalg.apply(lambda e: e.subs_power(qp), c) for c in powered.psi.coeffs)
    inv = series_inverse(substitute_power(raised, p, D))
    if gauge == "frobenius" and model.N > 1:
        one = sol.psi[0][0, 0]
        Ginv = _as_exact_matrix(linalg.inverse(frobenius_gauge(model, p)), one)
        inv = TruncSeries(linalg.matmul(Ginv, c) for c in inv.coeffs)
    F = series_mul(sol.psi, inv)
    return IntertwinerSeries(F, p, D, model, gauge, qp, False, sol.psi)


def _phi_multiplicity(den, phi) -> int:
    k = 0
    while den.degree() >= phi.degree():
        qt, r = divmod(den, phi)
        if not r.is_zero():
            break
        den, k = qt, k + 1
    return k


def _series_certificates(series: TruncSeries, p: int) -> list[dict]:
    phi = cyclotomic_poly(p)
    out = []
    for d, c in enumerate(series.coeffs):
        for (i, j), e in np.ndenumerate(c):
            g = e.den.gcd(phi)
            out.append({
                "degree": d,
                "entry": [int(i), int(j)],
                "den_degree": e.den.degree(),
                "phi_multiplicity": _phi_multiplicity(e.den, phi) if g.degree() > 0 else 0,
                "coprime": g.degree() == 0,
            })
    return out


def pole_certificate(F: IntertwinerSeries, psi: TruncSeries | None = None) -> dict:
    """Check gcd(den, Phi_p) = 1 for every entry of every z-coefficient of F.

    As a positive control the uncompensated Psi must have a Phi_p-divisible
    denominator at some order <= D.
    """
    if F.reduced:
        raise ValueError("certificate needs the raw Q(q) coefficients")
    p = F.p
    certs = _series_certificates(F.F, p)
    offending = [c for c in certs if not c["coprime"]]
    psi = F.psi if psi is None else psi
    control = _series_certificates(psi, p) if psi is not None else []
    control_hits = [c for c in control if not c["coprime"]]
    return {
        "p": p,
        "order": F.order,
        "gauge": F.gauge,
        "q_power": F.q_power,
        "passed": not offending,
        "entries": certs,
        "offending": offending,
        "control_confirmed": bool(control_hits),
        "control_first_hit": control_hits[0] if control_hits else None,
    }


def ratfun_at_zeta(e: RatFun, p: int, k: int = 1) -> CycloNum:
    """Value of e(q) at q = zeta_p^k; the denominator must not vanish there."""
    num = CycloNum(list(e.num.coeffs), p)
    den = CycloNum(list(e.den.coeffs), p)
    if k != 1:
        num, den = num.galois(k), den.galois(k)
    if den.is_zero():
        raise CertificateError("denominator vanishes at zeta_p; pole certificate must fail")
    return num / den


def reduce_at_zeta(F: IntertwinerSeries, k: int = 1) -> IntertwinerSeries:
    """Map every coefficient into Q(zeta_p) (q -> zeta_p^k)."""
    p = F.p
    coeffs = [linalg.apply(lambda e: ratfun_at_zeta(e, p, k), c) for c in F.F.coeffs]
    return IntertwinerSeries(TruncSeries(coeffs), p, F.order, F.model, F.gauge, F.q_power, True)


def numeric_limit_gap(F: IntertwinerSeries, offset: float = 1e-6, k: int = 1) -> float:
    """max |F_raw(q) - F(zeta)| coefficientwise at q = zeta (1 - offset)."""
    p = F.p
    zeta = complex(math.cos(2 * math.pi * k / p), math.sin(2 * math.pi * k / p))
    q = zeta * (1 - offset)
    red = reduce_at_zeta(F, k)
    gap = 0.0
    for raw, exact in zip(F.F.coeffs, red.F.coeffs):
        for e, x in zip(raw.flat, exact.flat):
            val = complex(e.num(q)) / complex(e.den(q))
            gap = max(gap, abs(val - x.to_complex(k)) / max(1.0, abs(x.to_complex(k))))
    return gap


def _cyclo_matrix(a: np.ndarray, p: int) -> np.ndarray:
    return linalg.apply(lambda e: e if isinstance(e, CycloNum) else CycloNum.from_scalar(e, p), a)


def _taylor_matrix_series(mat: np.ndarray, D: int, p: int) -> TruncSeries:
    n = mat.shape[0]
    tay = {idx: mat[idx].taylor(D) for idx in np.ndindex(mat.shape)}
    coeffs = []
    for d in range(D + 1):
        c = np.empty((n, n), dtype=object)
        for idx, t in tay.items():
            c[idx] = t[d] if isinstance(t[d], CycloNum) else CycloNum.from_scalar(t[d], p)
        coeffs.append(c)
    return TruncSeries(coeffs)


PRODUCT_ORDERS = ("iterate", "literal")


def conjugation_check(model: QDEModel, p: int, D: int | None = None, *, product: str = "iterate",
                      F: IntertwinerSeries | None = None) -> TruncSeries:
    """R(z) = F(z) Mq(z^p; a^p, hbar^p) - P(z) F(z) over Q(zeta_p), to order D.

    ``product="iterate"`` uses P = M(z q^{p-1}) ... M(z), the operator that
    iterating the difference equation produces; ``"literal"`` uses
    M(z) M(z q) ... M(z q^{p-1}).
    """
    if product not in PRODUCT_ORDERS:
        raise ValueError(f"product must be one of {PRODUCT_ORDERS}")
    D = 2 * p if D is None else D
    if F is None:
        F = compute_intertwiner(model, p, D)
    Fz = F if F.reduced else reduce_at_zeta(F)
    zeta = CycloNum.zeta(p)
    P = qde_iterate(model, p, zeta) if product == "iterate" else iterated_product(model, p, zeta)
    Pser = _taylor_matrix_series(P, D, p)
    Mp = expand_M(model.powered(p), D // p)
    Mp = TruncSeries(_cyclo_matrix(c, p) for c in Mp.coeffs)
    Mp = substitute_power(Mp, p, D)
    return series_mul(Fz.F, Mp) - series_mul(Pser, Fz.F)


def series_is_zero(s: TruncSeries) -> bool:
    return all(linalg.is_zero_matrix(c) for c in s.coeffs)


def first_nonzero_order(s: TruncSeries):
    for d, c in enumerate(s.coeffs):
        if not linalg.is_zero_matrix(c):
            return d
    return None


# --- scalar T*P^0 closed form ------------------------------------------------

def tpp0_closed_form(hbar, p: int, D: int, *, corrected: bool = False, k: int = 1) -> TruncSeries:
    """prod_{m <= D, p does not divide m} exp((hbar^m - 1) z^m / (m (zeta^m - 1))).

    With ``corrected=True`` the factor ((1 - z^p)/(1 - hbar^p z^p))^{(p-1)/(2p)}
    is included; it comes from the m divisible by p, where the poles of the two
    solutions cancel but leave a finite remainder.
    """
    require_prime(p)
    hbar = Fraction(hbar) if isinstance(hbar, int) else hbar
    zeta = CycloNum.zeta(p, k)
    zero = CycloNum.from_scalar(0, p)
    expo = [zero] * (D + 1)
    for m in range(1, D + 1):
        if m % p:
            expo[m] = (hbar ** m - 1) / (m * (zeta ** m - 1))
        elif corrected:
            j = m // p
            expo[m] = CycloNum.from_scalar(Fraction(p - 1, 2 * p) * (hbar ** m - 1) / j, p)
    return series_exp(TruncSeries(expo))


def tpp0_intertwiner(hbar, p: int, D: int, k: int = 1) -> TruncSeries:
    """Reduced scalar intertwiner of T*P^0 as a series over Q(zeta_p)."""
    model = build_model("tpp0", hbar=hbar)
    F = reduce_at_zeta(compute_intertwiner(model, p, D), k)
    return TruncSeries(c[0, 0] for c in F.F.coeffs)


def series_difference_orders(a: TruncSeries, b: TruncSeries) -> list[int]:
    return [d for d, (x, y) in enumerate(zip(a.coeffs, b.coeffs)) if x != y]
