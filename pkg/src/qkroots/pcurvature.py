"""Differential operators over F_p(z)[s], p-curvature and the pencil checks.

Matrix entries are polynomials in the pencil variable s (``Poly``) whose
coefficients are ``RatFun`` over ``FpPoly``.  Composition uses the Leibniz
rule and never assumes d^p = 0, so structural identities are checked on the
full operator.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import linalg
from .exact.cyclo import CycloNum, lambda_valuation
from .exact.fp import FpPoly, PrimeFieldElem
from .exact.padic import PiAdicMat
from .exact.poly import Poly
from .exact.primes import require_prime
from .exact.ratfun import RatFun


class StructureError(ArithmeticError):
    """The p-th power of a connection is not a pure matrix operator."""


class MatrixFileError(ValueError):
    pass


# scalars of F_p(z)[s] ---------------------------------------------------------
def fp_const(c, p: int) -> RatFun:
    if isinstance(c, Fraction):
        c = PrimeFieldElem(c, p).value
    return RatFun.constant(int(c) % p, p)


def fp_z(p: int) -> RatFun:
    return RatFun.variable(p=p)


def s_const(f: RatFun) -> Poly:
    """An s-free element."""
    return Poly((f,))


def s_times(f: RatFun) -> Poly:
    """s * f."""
    return Poly((RatFun.constant(0, f.num.p), f))


def s_zero(p: int) -> Poly:
    return Poly(())


def s_one(p: int) -> Poly:
    return Poly((fp_const(1, p),))


def s_pencil(p: int) -> Poly:
    """s^p - s."""
    c = [fp_const(0, p)] * (p + 1)
    c[1] = fp_const(-1, p)
    c[p] = fp_const(1, p)
    return Poly(c)


def _dz(e: Poly) -> Poly:
    # Poly pads with int zeros
    return Poly([c.deriv() if isinstance(c, RatFun) else 0 for c in e.coeffs])


def _mat_dz(m: np.ndarray) -> np.ndarray:
    return linalg.apply(_dz, m)


def _s_matrix(m: np.ndarray, scale_s: bool) -> np.ndarray:
    return linalg.apply(lambda f: s_times(f) if scale_s else s_const(f), m)


def _zero_mat(n: int) -> np.ndarray:
    return linalg.zeros(n, zero=Poly(()))


def _id_mat(n: int, p: int) -> np.ndarray:
    return linalg.identity(n, s_one(p), Poly(()))


def _mat_is_zero(m: np.ndarray) -> bool:
    return all(e.is_zero() for e in m.flat)


def _mat_eq(a: np.ndarray, b: np.ndarray) -> bool:
    return all(x == y for x, y in zip(a.flat, b.flat))


# operators ----------------------------------------------------------------------
class DiffOp:
    """sum_k M_k(z) d^k with N x N matrix coefficients."""

    __slots__ = ("coeffs", "p", "n")

    def __init__(self, coeffs, p: int):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and _mat_is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = tuple(coeffs)
        self.p = p
        self.n = coeffs[0].shape[0]

    @classmethod
    def identity(cls, n: int, p: int) -> "DiffOp":
        return cls([_id_mat(n, p)], p)

    @classmethod
    def d(cls, n: int, p: int) -> "DiffOp":
        return cls([_zero_mat(n), _id_mat(n, p)], p)

    @classmethod
    def multiplication(cls, m: np.ndarray, p: int) -> "DiffOp":
        return cls([m], p)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> np.ndarray:
        return self.coeffs[k] if k < len(self.coeffs) else _zero_mat(self.n)

    def _combine(self, other, sign):
        k = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(k):
            a, b = self.coefficient(i), other.coefficient(i)
            out.append(a + b if sign > 0 else a - b)
        return DiffOp(out, self.p)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return diffop_compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        k = max(len(self.coeffs), len(other.coeffs))
        return all(_mat_eq(self.coefficient(i), other.coefficient(i)) for i in range(k))

    def left_mul(self, m: np.ndarray) -> "DiffOp":
        return DiffOp([linalg.matmul(m, c) for c in self.coeffs], self.p)

    def first_difference(self, other: "DiffOp"):
        """(d-order, row, col) of the first unequal coefficient, or None."""
        k = max(len(self.coeffs), len(other.coeffs))
        for i in range(k):
            a, b = self.coefficient(i), other.coefficient(i)
            for (r, c), x in np.ndenumerate(a):
                if x != b[r, c]:
                    return (i, r, c)
        return None


def diffop_compose(l1: DiffOp, l2: DiffOp) -> DiffOp:
    """L1 o L2 by d^i f = sum_r C(i, r) f^(r) d^(i-r)."""
    if l1.n != l2.n or l1.p != l2.p:
        raise ValueError("operators over different matrix sizes or fields")
    p = l1.p
    n = l1.n
    out = [_zero_mat(n) for _ in range(l1.order + l2.order + 1)]
    # derivatives of the right coefficients, computed lazily
    derivs = [[b] for b in l2.coeffs]
    for i, a in enumerate(l1.coeffs):
        if _mat_is_zero(a):
            continue
        for r in range(i + 1):
            binom = math.comb(i, r) % p
            if binom == 0:
                continue
            for j, chain in enumerate(derivs):
                while len(chain) <= r:
                    chain.append(_mat_dz(chain[-1]))
                b = chain[r]
                if _mat_is_zero(b):
                    continue
                term = linalg.matmul(a, b)
                if binom != 1:
                    term = linalg.apply(lambda e: e * binom, term)
                out[i + j - r] = out[i + j - r] + term
    return DiffOp(out, p)


@dataclass(frozen=True)
class ConnectionData:
    """The pencil d + s A(z) with A over F_p(z)."""

    A: np.ndarray
    p: int

    def __post_init__(self):
        require_prime(self.p)
        for e in self.A.flat:
            if not isinstance(e, RatFun) or not isinstance(e.num, FpPoly) or e.num.p != self.p:
                raise ValueError("connection entries must be rational functions over F_p")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def operator(self) -> DiffOp:
        """d + s A."""
        return DiffOp([_s_matrix(self.A, True), _id_mat(self.n, self.p)], self.p)

    def log_operator(self) -> DiffOp:
        """z d + s z A."""
        z = fp_z(self.p)
        zA = linalg.apply(lambda e: e * z, self.A)
        zI = linalg.identity(self.n, s_const(z), Poly(()))
        return DiffOp([_s_matrix(zA, True), zI], self.p)


def operator_power(op: DiffOp, k: int) -> DiffOp:
    acc = op
    for _ in range(k - 1):
        acc = diffop_compose(op, acc)
    return acc


def p_curvature(conn: ConnectionData) -> np.ndarray:
    """M_0 of (d + s A)^p, after checking the operator has no d^1..d^(p-1)
    part and d^p enters with the identity."""
    p = conn.p
    power = operator_power(conn.operator(), p)
    if power.order != p:
        raise StructureError(f"(d + sA)^p has order {power.order}, expected {p}")
    for k in range(1, p):
        if not _mat_is_zero(power.coefficient(k)):
            raise StructureError(f"coefficient of d^{k} in (d + sA)^p is nonzero")
    if not _mat_eq(power.coefficient(p), _id_mat(conn.n, p)):
        raise StructureError("coefficient of d^p in (d + sA)^p is not the identity")
    return power.coefficient(0)


def log_identity_check(conn: ConnectionData) -> dict:
    """(z d + s z A)^p - (z d + s z A) = z^p (d + s A)^p as operators."""
    p = conn.p
    lop = conn.log_operator()
    left = operator_power(lop, p) - lop
    zp = linalg.identity(conn.n, s_const(fp_z(p) ** p), Poly(()))
    right = operator_power(conn.operator(), p).left_mul(zp)
    diff = left.first_difference(right)
    return {"p": p, "n": conn.n, "passed": diff is None, "offending": diff}


def monomial_d_power_vanishes(p: int, n: int) -> bool:
    """d^p z^n = 0 in F_p[z]."""
    f = fp_z(p) ** n
    for _ in range(p):
        f = f.deriv()
    return f.is_zero()


# Stirling numbers -------------------------------------------------------------
def stirling_row(n: int) -> list:
    """a_{n,1..n} from a_{m+1,k} = a_{m,k-1} + k a_{m,k}, a_{1,1} = 1."""
    if n < 1:
        raise ValueError("n >= 1")
    row = [1]
    for m in range(1, n):
        new = [0] * (m + 1)
        for k in range(1, m + 2):
            left = row[k - 2] if k >= 2 else 0
            here = row[k - 1] if k <= m else 0
            new[k - 1] = left + k * here
        row = new
    return row


def stirling_check(p: int) -> dict:
    """Row p reduced mod p is (1, 0, ..., 0, 1)."""
    require_prime(p)
    row = stirling_row(p)
    red = [a % p for a in row]
    bad = [k for k in range(2, p) if red[k - 1] != 0]
    passed = not bad and red[0] == 1 and row[-1] == 1
    return {"p": p, "row": row, "reduced": red, "passed": passed, "offending": bad}


# pi-adic binomial lemma ---------------------------------------------------------
def pi_lemma_check(p: int, alpha, beta) -> dict:
    """(1 + pi a + pi^2 b)^p - (1 + pi^p (a^p - a)) has pi-valuation >= p + 1,
    where pi^(p-1) = -p."""
    require_prime(p)
    alpha = np.asarray(alpha, dtype=object)
    beta = np.asarray(beta, dtype=object)
    n = alpha.shape[0]
    eye = np.eye(n, dtype=int).astype(object)
    x = PiAdicMat.from_terms({0: eye, 1: alpha, 2: beta}, n, p)
    ap = np.linalg.matrix_power(alpha.astype(object), p) if p > 0 else eye
    expected = PiAdicMat.from_terms({0: eye, p: ap - alpha}, n, p)
    diff = x ** p - expected
    val = diff.pi_valuation()
    short = [t for t in diff.valuation_table() if t[3] < p + 1]
    return {"p": p, "n": n, "valuation": val, "bound": p + 1, "passed": val >= p + 1, "offending": short}


# T*P^1 pencil -------------------------------------------------------------------
def tpp1_log_matrix(p: int, u1, u2, h) -> np.ndarray:
    """[[u1 - h t, -h t], [-h/(z-1), u2 - h t]] with t = z/(z-1), over F_p."""
    z = fp_z(p)
    one = fp_const(1, p)
    u1, u2, h = (fp_const(v, p) for v in (u1, u2, h))
    t = z / (z - one)
    return linalg.obj_array([[u1 - h * t, -(h * t)], [-(h / (z - one)), u2 - h * t]])


def tpp1_pencil(p: int, u1, u2, h) -> ConnectionData:
    """The pencil d + s A with z A the T*P^1 log matrix."""
    z = fp_z(p)
    return ConnectionData(linalg.apply(lambda e: e / z, tpp1_log_matrix(p, u1, u2, h)), p)


def _charpoly(m: np.ndarray, one) -> Poly:
    n = m.shape[0]
    t = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), range(n)):
        t[i, j] = Poly((-m[i, j], one)) if i == j else Poly((-m[i, j],))
    return linalg.det(t)


def pencil_spectrum_check(p: int, u1, u2, h) -> dict:
    """charpoly(z^p C_p(d + sA)) == charpoly((s^p - s) z^p A(z^p)) in F_p(z)[s][T]."""
    conn = tpp1_pencil(p, u1, u2, h)
    z = fp_z(p)
    zp = s_const(z ** p)
    left = linalg.apply(lambda e: zp * e, p_curvature(conn))
    pen = s_pencil(p)
    right = linalg.apply(lambda e: pen * s_const((z ** p) * e.subs_power(p)), conn.A)
    report = {"p": p, "params": {"u1": int(u1) % p, "u2": int(u2) % p, "h": int(h) % p}}
    if linalg.trace(left) != linalg.trace(right):
        report.update(passed=False, stage="trace")
        return report
    one = s_one(p)
    cl, cr = _charpoly(left, one), _charpoly(right, one)
    report.update(passed=(cl == cr), stage="charpoly")
    if cl != cr:
        report["left"] = repr(cl)
        report["right"] = repr(cr)
    return report


# root-of-unity reduction --------------------------------------------------------
def _tpp1_series_at(p, a1, a2, hbar, zfac, order):
    """Taylor coefficients in z of the T*P^1 matrix M(w) at w = zfac * z."""
    one = CycloNum.from_scalar(1, p)
    c = hbar.inverse() - hbar
    h2 = hbar * hbar
    geo = [-(h2 * zfac) ** k for k in range(order + 1)]  # 1/(h2 w - 1)
    # numerator = N0 + N1 w
    n0 = [[-a1, 0 * one], [a1 * c, -a2]]
    n1 = [[a1, a2 * c], [0 * one, a2]]
    out = []
    for d in range(order + 1):
        m = np.empty((2, 2), dtype=object)
        for i, j in itertools.product(range(2), range(2)):
            v = n0[i][j] * geo[d]
            if d >= 1:
                v = v + n1[i][j] * zfac * geo[d - 1]
            m[i, j] = v
        out.append(m)
    return out


def _series_matmul(a, b, order):
    out = []
    for d in range(order + 1):
        acc = None
        for k in range(d + 1):
            t = linalg.matmul(a[k], b[d - k])
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def _digits(series, p, shift):
    """Divide each coefficient by lambda^shift and reduce mod lambda."""
    lam_inv = CycloNum.uniformizer(p).inverse() ** shift
    vals, digits = [], []
    for m in series:
        v = min((lambda_valuation(e) for e in m.flat), default=math.inf)
        vals.append(v)
        if v < shift:
            digits.append(None)
            continue
        digits.append(linalg.apply(lambda e: (e * lam_inv).reduce_mod_lambda().value, m))
    return vals, digits


def _fp_taylor_matrix(m: np.ndarray, order: int, p: int):
    out = [np.zeros((m.shape[0], m.shape[1]), dtype=int) for _ in range(order + 1)]
    for (i, j), e in np.ndenumerate(m):
        for d, c in enumerate(e.taylor(order)):
            out[d][i, j] = int(c) % p
    return out


def _fp_series_charpoly(series, p, order):
    """(trace, det) of a 2 x 2 matrix series over F_p, truncated."""
    tr = [int((m[0, 0] + m[1, 1]) % p) for m in series]
    det = []
    for d in range(order + 1):
        acc = 0
        for k in range(d + 1):
            a, b = series[k], series[d - k]
            acc += a[0, 0] * b[1, 1] - a[0, 1] * b[1, 0]
        det.append(int(acc % p))
    return tr, det


def root_reduction_check(p: int, u1, u2, h, D_z: int = 2, h_scale: int = 2) -> dict:
    """Exploratory: lambda-digits of the iterated product at zeta_p versus
    z^p C_p(d + A) at s = 1.

    Lift a_i = 1 + u_i lambda, hbar = 1 + h lambda, q = zeta_p.  With this lift
    the cohomological limit is the log matrix with h replaced by ``h_scale * h``.
    Status "pass" if the digits agree, otherwise "finding" together with the
    fallback comparison of characteristic polynomials mod lambda.
    """
    require_prime(p)
    if p not in (2, 3) or D_z > 3:
        raise ValueError("root reduction is bounded to p in {2, 3} and D_z <= 3")
    lam = CycloNum.uniformizer(p)
    zeta = CycloNum.zeta(p)
    one = CycloNum.from_scalar(1, p)
    a1, a2, hb = one + lam * u1, one + lam * u2, one + lam * h
    # (i) M(z) M(z zeta) ... M(z zeta^(p-1))
    prod = None
    for j in range(p):
        f = _tpp1_series_at(p, a1, a2, hb, zeta ** j, D_z)
        prod = f if prod is None else _series_matmul(prod, f, D_z)
    prod[0] = prod[0] - linalg.identity(2, one, 0 * one)
    vals, digits = _digits(prod, p, p)
    conn = ConnectionData(linalg.apply(lambda e: e / fp_z(p), tpp1_log_matrix(p, u1, u2, h_scale * h)), p)
    cp = p_curvature(conn)
    z = fp_z(p)
    at_one = linalg.apply(lambda e: sum((c for c in e.coeffs), fp_const(0, p)) * z ** p, cp)
    expected = _fp_taylor_matrix(at_one, D_z, p)
    extractable = all(d is not None for d in digits)
    agree = extractable and all(np.array_equal(np.asarray(d, dtype=int) % p, e) for d, e in zip(digits, expected))
    report = {
        "p": p,
        "params": {"u1": u1, "u2": u2, "h": h, "D_z": D_z, "h_scale": h_scale},
        "lambda_valuations": [v if v != math.inf else None for v in vals],
        "digits": [None if d is None else np.asarray(d, dtype=int).tolist() for d in digits],
        "expected": [e.tolist() for e in expected],
        "digits_agree": agree,
        # agreement carries no information when both sides vanish
        "all_digits_zero": extractable and all(not np.any(np.asarray(d, dtype=int) % p) for d in digits)
        and all(not np.any(e) for e in expected),
    }
    # (ii) powered quantum multiplication: its pi^p digit carries (s^p - s) at s = 1, i.e. 0
    powered = _tpp1_series_at(p, a1 ** p, a2 ** p, hb ** p, one, D_z)
    pw_series = []
    for d in range(D_z + 1):
        if d % p == 0 and d // p <= D_z:
            pw_series.append(powered[d // p])
        else:
            pw_series.append(linalg.zeros(2, zero=0 * one))
    pw_series[0] = pw_series[0] - linalg.identity(2, one, 0 * one)
    pvals = [min((lambda_valuation(e) for e in m.flat), default=math.inf) for m in pw_series]
    report["powered_valuations"] = [v if v != math.inf else None for v in pvals]
    report["powered_digit_vanishes"] = all(v >= p + 1 for v in pvals)
    if agree:
        report["status"] = "pass"
    else:
        fallback = None
        if extractable:
            got = _fp_series_charpoly([np.asarray(d, dtype=int) for d in digits], p, D_z)
            want = _fp_series_charpoly(expected, p, D_z)
            fallback = {"digits": {"trace": got[0], "det": got[1]},
                        "expected": {"trace": want[0], "det": want[1]},
                        "agree": got == want}
        report["fallback_charpoly"] = fallback
        report["status"] = "finding"
    return report


# plain-text matrix files --------------------------------------------------------
_TERM = re.compile(r"([+-]?)([^+-]+)")


def parse_poly(text: str) -> list:
    """Coefficients (low degree first, Fractions) of a polynomial in z such as
    ``3*z^2-z+1/2``.  No spaces; ``**`` is accepted for powers."""
    s = text.replace("**", "^").strip()
    if not s:
        raise MatrixFileError("empty polynomial")
    coeffs: dict[int, Fraction] = {}
    pos = 0
    for m in _TERM.finditer(s):
        if m.start() != pos:
            raise MatrixFileError(f"cannot parse {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(2)
        if "z" in body:
            head, _, tail = body.partition("z")
            head = head.rstrip("*")
            c = Fraction(head) if head else Fraction(1)
            if tail == "":
                e = 1
            elif tail.startswith("^") and tail[1:].isdigit():
                e = int(tail[1:])
            else:
                raise MatrixFileError(f"bad exponent in {text!r}")
        else:
            try:
                c = Fraction(body)
            except ValueError as exc:
                raise MatrixFileError(f"bad coefficient in {text!r}") from exc
            e = 0
        coeffs[e] = coeffs.get(e, Fraction(0)) + sign * c
    if pos != len(s):
        raise MatrixFileError(f"cannot parse {text!r}")
    top = max(coeffs)
    return [coeffs.get(k, Fraction(0)) for k in range(top + 1)]


def parse_entry(text: str, p: int) -> RatFun:
    """``num/den`` with polynomial strings in parentheses, or a polynomial."""
    t = text.strip()
    m = re.fullmatch(r"\(([^()]*)\)/\(([^()]*)\)", t)
    if m:
        num, den = parse_poly(m.group(1)), parse_poly(m.group(2))
    else:
        num, den = parse_poly(t), [Fraction(1)]

    def red(cs):
        out = []
        for c in cs:
            if c.denominator % p == 0:
                raise MatrixFileError(f"entry {text!r} has p in a denominator")
            out.append(PrimeFieldElem(c, p).value)
        return FpPoly(out, p)

    dp = red(den)
    if dp.is_zero():
        raise MatrixFileError(f"entry {text!r} has zero denominator mod {p}")
    return RatFun(red(num), dp)


def parse_matrix_text(text: str, p: int) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([parse_entry(tok, p) for tok in line.split()])
    if not rows or any(len(r) != len(rows) for r in rows):
        raise MatrixFileError("matrix file must hold a nonempty square matrix")
    return linalg.obj_array(rows)


def load_matrix_file(path, p: int) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix_text(fh.read(), p)


def random_connection(n: int, p: int, rng, num_degree: int = 2) -> ConnectionData:
    """Entries f/g with deg f <= num_degree and g in {1, z - c}."""
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            num = FpPoly([int(rng.integers(0, p)) for _ in range(num_degree + 1)], p)
            if rng.random() < 0.5:
                den = FpPoly([1], p)
            else:
                den = FpPoly([int(rng.integers(0, p)), 1], p)
            row.append(RatFun(num, den))
        rows.append(row)
    return ConnectionData(linalg.obj_array(rows), p)
