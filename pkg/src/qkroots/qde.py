"""Quantum difference operators for T*P^0 and T*P^1 and their solutions.

The T*P^1 operator in the stable basis is

    Mq(w) = [[a1 (w-1), a2 w c], [a1 c, a2 (w-1)]] / (hbar^2 w - 1),  c = 1/hbar - hbar,

and the q-dependence is restored as M(z, q) = Mq(z q).  The scalar T*P^0
model has M(z, q) = Mq(z) = (1 - z)/(1 - hbar z), with no restoration.  In
both cases M(0, q) = L is constant.  The fundamental solution Psi = sum Psi_d z^d with Psi_0 = 1 solves

    Psi(q z) L = M(z, q) Psi(z).
"""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .exact import linalg
from .exact.cyclo import CycloNum
from .exact.poly import Poly, exact_div
from .exact.ratfun import RatFun, q_variable
from .series import TruncSeries, one_series

MODELS = ("tpp0", "tpp1")


class ModelError(ValueError):
    pass


class ResonanceError(ArithmeticError):
    """The order-d Sylvester system is singular (q resonant at order d)."""

    def __init__(self, d: int):
        super().__init__(f"singular Sylvester system at order {d}")
        self.order = d


def _one_like(x):
    return x ** 0 if isinstance(x, (RatFun, CycloNum)) else 1


@dataclass(frozen=True)
class QDEModel:
    """Parameters of a rank-1 model; entries are computed on demand.

    Parameters may be ``Fraction``, ``complex``, ``CycloNum`` or any field
    element supporting the arithmetic used in ``mbold``.
    """

    name: str
    a1: object
    a2: object
    hbar: object
    rank: int = 1

    @property
    def N(self) -> int:
        return 1 if self.name == "tpp0" else 2

    @property
    def q_restored(self) -> bool:
        """True when M(z, q) = Mq(z q); False when M does not depend on q."""
        return self.name != "tpp0"

    def mbold(self, w) -> np.ndarray:
        """The q-independent operator Mq evaluated at ``w`` (any ring element)."""
        h = self.hbar
        if self.name == "tpp0":
            return linalg.obj_array([[exact_div(1 - w, 1 - h * w)]])
        a1, a2 = self.a1, self.a2
        c = exact_div(1, h) - h
        den = h * h * w - 1
        rows = [[a1 * (w - 1), a2 * w * c], [a1 * c, a2 * (w - 1)]]
        return linalg.obj_array([[exact_div(e, den) for e in r] for r in rows])

    def M(self, z, q) -> np.ndarray:
        """M(z, q): Mq(z q) for T*P^1, Mq(z) for T*P^0."""
        return self.mbold(z * q) if self.q_restored else self.mbold(z)

    @property
    def L(self) -> np.ndarray:
        return self.mbold(0 * self.hbar)

    def powered(self, p: int) -> "QDEModel":
        """Same model with a_i, hbar raised to the p-th power."""
        return QDEModel(self.name, self.a1 ** p, self.a2 ** p, self.hbar ** p, self.rank)

    def numeric(self, k: int = 1) -> "QDEModel":
        """Complex copy (CycloNum parameters embedded via zeta -> e^{2 pi i k/p})."""
        def conv(x):
            return x.to_complex(k) if isinstance(x, CycloNum) else complex(x)

        return QDEModel(self.name, conv(self.a1), conv(self.a2), conv(self.hbar), self.rank)


def build_model(name: str, a1=1, a2=2, hbar=3) -> QDEModel:
    """Construct ``tpp0`` or ``tpp1``; rejects degenerate parameters."""
    if name not in MODELS:
        raise ModelError(f"unknown model {name!r}; expected one of {MODELS}")
    conv = (lambda x: Fraction(x)) if all(isinstance(v, (int, Fraction)) for v in (a1, a2, hbar)) else (lambda x: x)
    a1, a2, hbar = conv(a1), conv(a2), conv(hbar)
    if hbar == 0 or hbar == 1 or hbar == -1:
        if name == "tpp1" or hbar == 0:
            raise ModelError("hbar must avoid 0 and +-1")
    if name == "tpp1":
        if a1 == 0 or a2 == 0:
            raise ModelError("equivariant parameters must be nonzero")
        if a1 == a2:
            raise ModelError("a1 and a2 must be distinct")
    return QDEModel(name, a1, a2, hbar)


def z_variable() -> RatFun:
    return RatFun.variable()


def mbold_ratfun(model: QDEModel) -> np.ndarray:
    """Mq as a matrix of rational functions in z."""
    return model.mbold(z_variable())


def expand_M(model: QDEModel, D: int) -> TruncSeries:
    """Taylor coefficients m_0..m_D of Mq(w) at w = 0 (so m_0 = L).

    M(z, q) then has z^k coefficient m_k q^k (m_k when not q-restored).
    """
    mat = mbold_ratfun(model)
    n = model.N
    taylors = {(i, j): mat[i, j].taylor(D) for i in range(n) for j in range(n)}
    coeffs = []
    for k in range(D + 1):
        c = np.empty((n, n), dtype=object)
        for (i, j), t in taylors.items():
            c[i, j] = t[k]
        coeffs.append(c)
    return TruncSeries(coeffs)


def _q_symbol() -> RatFun:
    return q_variable()


@dataclass(frozen=True)
class FundamentalSolution:
    psi: TruncSeries
    model: QDEModel
    q: object

    @property
    def order(self) -> int:
        return self.psi.order


def _sylvester_numeric(qd, L, rhs):
    n = L.shape[0]
    I = np.eye(n)
    # vec(X L) = (L^T kron I) vec(X), vec(L X) = (I kron L) vec(X), column-major
    A = qd * np.kron(L.T, I) - np.kron(I, L)
    x = np.linalg.solve(A, rhs.reshape(-1, order="F"))
    return x.reshape((n, n), order="F")


def _sylvester_exact(qd, L, rhs):
    n = L.shape[0]
    size = n * n
    A = np.empty((size, size), dtype=object)
    for r in range(size):
        for c in range(size):
            A[r, c] = 0
    # unknown X[i, j] sits at index i + n j; equation row (i, j) as well
    for i, j in itertools.product(range(n), range(n)):
        row = i + n * j
        for k in range(n):
            # (q^d X L)[i, j] = q^d sum_k X[i, k] L[k, j]
            if L[k, j] != 0:
                A[row, i + n * k] = A[row, i + n * k] + qd * L[k, j]
            # (L X)[i, j] = sum_k L[i, k] X[k, j]
            if L[i, k] != 0:
                A[row, k + n * j] = A[row, k + n * j] - L[i, k]
    b = np.empty((size, 1), dtype=object)
    for i, j in itertools.product(range(n), range(n)):
        b[i + n * j, 0] = rhs[i, j]
    x = linalg.solve(A, b)
    out = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), range(n)):
        out[i, j] = x[i + n * j, 0]
    return out


def solve_fundamental(model: QDEModel, D: int, q=None) -> FundamentalSolution:
    """Psi to order D by solving q^d Psi_d L - L Psi_d = sum_{k>=1} M_k Psi_{d-k}.

    ``q=None`` works over Q(q) with q symbolic; otherwise ``q`` is a field
    element (``complex`` selects floating point).
    """
    numeric = isinstance(q, (complex, float)) or isinstance(model.hbar, complex)
    if q is None:
        q = _q_symbol()
    m = expand_M(model, D)
    n = model.N
    if numeric:
        q = complex(q)
        mk = [np.array(c, dtype=complex) for c in m.coeffs]
        L = mk[0]
        Mk = [mk[k] * q ** k if model.q_restored else mk[k] for k in range(D + 1)]
        psi = [np.eye(n, dtype=complex)]
        for d in range(1, D + 1):
            rhs = sum(Mk[k] @ psi[d - k] for k in range(1, d + 1))
            try:
                psi.append(_sylvester_numeric(q ** d, L, rhs))
            except np.linalg.LinAlgError as exc:
                raise ResonanceError(d) from exc
        return FundamentalSolution(TruncSeries(psi), model, q)

    L = m.coeffs[0]
    one = _one_like(q)
    qpow = [one]
    for _ in range(D):
        qpow.append(qpow[-1] * q)
    if model.q_restored:
        Mk = [linalg.apply(lambda e, k=k: e * qpow[k], m.coeffs[k]) for k in range(D + 1)]
    else:
        Mk = list(m.coeffs)
    psi = [linalg.identity(n, one, 0 * one)]
    for d in range(1, D + 1):
        rhs = linalg.matmul(Mk[1], psi[d - 1])
        for k in range(2, d + 1):
            rhs = rhs + linalg.matmul(Mk[k], psi[d - k])
        try:
            psi.append(_sylvester_exact(qpow[d], L, rhs))
        except ZeroDivisionError as exc:
            raise ResonanceError(d) from exc
    return FundamentalSolution(TruncSeries(psi), model, q)


def qde_residual(sol: FundamentalSolution) -> TruncSeries:
    """Coefficients of Psi(q z) L - M(z, q) Psi(z) up to the solution order."""
    D = sol.order
    model, q = sol.model, sol.q
    m = expand_M(model, D)
    L = m.coeffs[0]
    numeric = isinstance(q, complex)
    out = []
    for d in range(D + 1):
        qd = q ** d
        if numeric:
            acc = qd * sol.psi[d] @ np.array(L, dtype=complex)
            for k in range(d + 1):
                qk = q ** k if model.q_restored else 1
                acc = acc - qk * np.array(m.coeffs[k], dtype=complex) @ sol.psi[d - k]
        else:
            acc = linalg.apply(lambda e: e * qd, linalg.matmul(sol.psi[d], L))
            for k in range(d + 1):
                qk = q ** k if model.q_restored else 1
                acc = acc - linalg.apply(lambda e: e * qk, linalg.matmul(m.coeffs[k], sol.psi[d - k]))
        out.append(acc)
    return TruncSeries(out)


# --- iterated products -------------------------------------------------------

def _shifted_args(p: int, q_value):
    """Shift factors q^0, ..., q^{p-1} in the ring of ``q_value``."""
    one = _one_like(q_value)
    out = [one]
    for _ in range(p - 1):
        out.append(out[-1] * q_value)
    return out


def _product(mats):
    acc = mats[0]
    for m in mats[1:]:
        acc = linalg.matmul(acc, m) if acc.dtype == object else acc @ m
    return acc


def _split(mat: np.ndarray):
    """Write a matrix of RatFun as (polynomial matrix, common monic denominator)."""
    den = None
    for e in mat.flat:
        d = e.den
        den = d if den is None else den * (d // den.gcd(d))
    num = linalg.apply(lambda e: e.num * (den // e.den), mat)
    return num, den


def _ordered_product(model: QDEModel, shifts, q_value, z):
    numeric = isinstance(q_value, complex) or isinstance(z, complex)
    if numeric:
        return _product([np.array(model.M(z * s, q_value), dtype=complex) for s in shifts])
    if not isinstance(z, RatFun):
        return _product([model.M(z * s, q_value) for s in shifts])
    # polynomial numerators with one scalar denominator per factor
    num, den = None, None
    for s in shifts:
        n_j, d_j = _split(model.M(z * s, q_value))
        num = n_j if num is None else linalg.matmul(num, n_j)
        den = d_j if den is None else den * d_j
    return linalg.apply(lambda e: RatFun(e, den), num)


def iterated_product(model: QDEModel, p: int, q_value, z=None) -> np.ndarray:
    """M(z, q) M(z q, q) ... M(z q^{p-1}, q) at q = ``q_value``.

    ``z`` defaults to the rational-function variable; a numeric ``z`` with a
    complex ``q_value`` gives a complex matrix.
    """
    if p < 1:
        raise ValueError("p must be positive")
    if z is None:
        z = z_variable()
    return _ordered_product(model, _shifted_args(p, q_value), q_value, z)


def qde_iterate(model: QDEModel, p: int, q_value, z=None) -> np.ndarray:
    """M(z q^{p-1}, q) ... M(z q, q) M(z, q): the operator produced by iterating
    the difference equation p times, Psi(z q^p) L^p = [this] Psi(z)."""
    if p < 1:
        raise ValueError("p must be positive")
    if z is None:
        z = z_variable()
    return _ordered_product(model, list(reversed(_shifted_args(p, q_value))), q_value, z)


def characteristic_residual(X: np.ndarray, a1, a2, hbar, p: int = 1, z=None) -> np.ndarray:
    """(X - a1^p)(X - a2^p) - z^p hbar^{2p} (X - a1^p hbar^{-2p})(X - a2^p hbar^{-2p})."""
    if z is None:
        z = z_variable()
    n = X.shape[0]
    numeric = X.dtype != object
    A1, A2, H2 = a1 ** p, a2 ** p, hbar ** (2 * p)
    zp = z ** p
    if numeric:
        I = np.eye(n)
        return (X - A1 * I) @ (X - A2 * I) - zp * H2 * (X - A1 / H2 * I) @ (X - A2 / H2 * I)

    if isinstance(X[0, 0], RatFun):
        # clear denominators so that no gcd is taken until the end
        num, den = _split(X)
        Xs, scale = num, den
    else:
        Xs, scale = X, 1
    one = _one_like(Xs[0, 0])

    def shift(c):
        out = Xs.copy()
        for i in range(n):
            out[i, i] = out[i, i] - scale * c
        return out

    lhs = linalg.matmul(shift(A1), shift(A2))
    rhs = linalg.matmul(shift(exact_div(A1, H2)), shift(exact_div(A2, H2)))
    coef = H2 * zp if not isinstance(zp, RatFun) else None
    if coef is None:
        # z^p hbar^{2p} as a polynomial multiplier
        res = lhs - linalg.apply(lambda e: e * zp.num * H2, rhs)
        den2 = scale * scale
        return linalg.apply(lambda e: RatFun(e, den2), res)
    res = lhs - linalg.apply(lambda e: e * coef, rhs)
    if not isinstance(scale, Poly):
        return res
    return linalg.apply(lambda e: e / (scale * scale), res)


def qring_roots(z, a1, a2, hbar) -> np.ndarray:
    """The two roots in L of (L-a1)(L-a2) = z hbar^2 (L - a1/hbar^2)(L - a2/hbar^2)."""
    z, a1, a2, hbar = complex(z), complex(a1), complex(a2), complex(hbar)
    h2 = hbar * hbar
    A = 1 - z * h2
    B = -(a1 + a2) + z * (a1 + a2)
    C = a1 * a2 - z * a1 * a2 / h2
    disc = cmath.sqrt(B * B - 4 * A * C)
    return np.array([(-B + disc) / (2 * A), (-B - disc) / (2 * A)])


def eigenvalues(X: np.ndarray) -> np.ndarray:
    """Eigenvalues of a small complex matrix (closed form for N <= 2)."""
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    if n == 1:
        return X[0].copy()
    if n == 2:
        tr = X[0, 0] + X[1, 1]
        det = X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0]
        disc = cmath.sqrt(tr * tr - 4 * det)
        r1 = (tr + disc) / 2
        # the product form avoids cancellation in the smaller root
        r2 = det / r1 if r1 != 0 else (tr - disc) / 2
        return np.array([r1, r2])
    return np.linalg.eigvals(X)


def match_multisets(u, v) -> tuple[float, tuple]:
    """Optimal pairing minimising the maximum relative distance.

    Returns (max relative distance, perm) with u[i] paired to v[perm[i]].
    Bottleneck assignment: binary search over the distinct pairwise distances
    with a bipartite perfect-matching test.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError("multisets have different sizes")
    n = len(u)
    if n == 0:
        return 0.0, ()
    scale = np.maximum(np.maximum(np.abs(u)[:, None], np.abs(v)[None, :]), 1e-300)
    dist = np.abs(u[:, None] - v[None, :]) / scale
    levels = np.unique(dist)
    lo, hi = 0, len(levels) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        match = maximum_bipartite_matching(csr_matrix(dist <= levels[mid]), perm_type="column")
        if np.all(match >= 0):
            best, hi = match, mid - 1
        else:
            lo = mid + 1
    perm = tuple(int(j) for j in best)
    return float(max(dist[i, j] for i, j in enumerate(perm))), perm


# --- cohomological limit ----------------------------------------------------

class Dual:
    """x + y eps with eps^2 = 0 over any field."""

    __slots__ = ("x", "y")

    def __init__(self, x, y=0):
        self.x, self.y = x, y

    @staticmethod
    def _c(o):
        return o if isinstance(o, Dual) else Dual(o, 0)

    def __add__(self, o):
        o = self._c(o)
        return Dual(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.x, -self.y)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        return Dual(self.x * o.x, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._c(o)
        inv = 1 / o.x if not isinstance(o.x, int) else Fraction(1, o.x)
        return Dual(self.x * inv, (self.y * o.x - self.x * o.y) * inv * inv)

    def __rtruediv__(self, o):
        return self._c(o) / self

    def __pow__(self, n: int):
        acc = Dual(1, 0)
        for _ in range(n):
            acc = acc * self
        return acc

    def __eq__(self, o):
        o = self._c(o)
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))


COH_DIRECTIONS = ("u1", "u2", "h", "kappa")


def cohomological_limit(model_name: str = "tpp1") -> dict:
    """First-order term C(z) of M(z, q) at q = 1 + eps kappa, a_i = 1 + eps u_i,
    hbar = 1 + eps h.

    C is linear in (u1, u2, h, kappa); the result maps each direction to its
    matrix of rational functions in z over Q.
    """
    if model_name != "tpp1":
        raise ModelError("the cohomological limit is implemented for tpp1")
    z = z_variable()
    one = RatFun.constant(Fraction(1))
    out = {}
    for d in COH_DIRECTIONS:
        def par(name):
            return Dual(one, one if d == name else 0 * one)

        model = QDEModel("tpp1", par("u1"), par("u2"), par("h"))
        M = model.M(Dual(z, 0 * z), par("kappa"))
        out[d] = linalg.apply(lambda e: e.y if isinstance(e, Dual) else 0 * z, M)
        base = linalg.apply(lambda e: e.x if isinstance(e, Dual) else e, M)
        if not linalg.is_zero_matrix(base - linalg.identity(2, one, 0 * one)):
            raise ArithmeticError("M does not reduce to the identity at eps = 0")
    return out


def printed_connection(h_scale=1) -> dict:
    """The T*P^1 matrix [[u1 - h z/(z-1), -h z/(z-1)], [-h/(z-1), u2 - h z/(z-1)]]
    in the same linear-form layout, with h replaced by h_scale * h."""
    z = z_variable()
    zero = 0 * z
    one = z ** 0
    t = z / (z - 1)
    s = one / (z - 1)
    hs = Fraction(h_scale)
    return {
        "u1": linalg.obj_array([[one, zero], [zero, zero]]),
        "u2": linalg.obj_array([[zero, zero], [zero, one]]),
        "h": linalg.obj_array([[-t * hs, -t * hs], [-s * hs, -t * hs]]),
        "kappa": linalg.obj_array([[zero, zero], [zero, zero]]),
    }


def linear_forms_equal(a: dict, b: dict) -> bool:
    return all(linalg.is_zero_matrix(a[k] - b[k]) for k in COH_DIRECTIONS)


def evaluate_linear_form(form: dict, values: dict) -> np.ndarray:
    """Substitute numbers (or field elements) for u1, u2, h, kappa."""
    acc = None
    for k in COH_DIRECTIONS:
        v = values.get(k, 0)
        term = linalg.apply(lambda e: e * v, form[k])
        acc = term if acc is None else acc + term
    return acc
