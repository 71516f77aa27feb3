"""Bethe equations for T*Gr(k, n) and their solutions.

Component m of the system is

    prod_j (x_m - a_j)/(a_j - hbar x_m) * prod_{l != m} (x_l - hbar x_m)/(hbar x_l - x_m) = z hbar^{-n/2},

which is exp(x_m dY/dx_m) = 1 for the Yang-Yang function of ``vertex``.
For k = 1, n = 2 it reads (x-a1)(x-a2) = z hbar (x - a1/hbar)(x - a2/hbar),
the T*P^1 quantum K-theory relation with hbar here equal to hbar^2 of the
difference operator.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .qde import build_model, eigenvalues, iterated_product, match_multisets
from .vertex import YangYangData


class BetheError(RuntimeError):
    pass


class PoleError(BetheError):
    pass


class PathFailure(BetheError):
    def __init__(self, path_id, t):
        super().__init__(f"homotopy path {path_id} stalled at t = {t:.3e} (step underflow)")
        self.path_id = path_id
        self.t = t


class RootCollision(BetheError):
    pass


class CountMismatch(BetheError):
    def __init__(self, found, expected):
        super().__init__(f"found {found} Bethe solutions, expected {expected}")
        self.found = found
        self.expected = expected


@dataclass(frozen=True)
class GrassmannianData:
    k: int
    n: int
    a: tuple
    hbar: complex
    z: complex

    def __post_init__(self):
        if not 0 < self.k <= self.n:
            raise ValueError("need 0 < k <= n")
        if len(self.a) != self.n:
            raise ValueError("need n evaluation parameters")
        a = [complex(v) for v in self.a]
        for i, j in itertools.combinations(range(self.n), 2):
            if abs(a[i] - a[j]) < 1e-14:
                raise ValueError("evaluation parameters must be pairwise distinct")
        h = complex(self.hbar)
        if abs(h) < 1e-14 or any(abs(h ** r - 1) < 1e-12 for r in range(1, 5)):
            raise ValueError("hbar must be nonzero and not a root of unity of order <= 4")

    @property
    def twist(self) -> complex:
        """z hbar^{-n/2} with the principal square root."""
        return complex(self.z) * cmath.sqrt(complex(self.hbar)) ** (-self.n)

    def powered(self, p: int) -> "GrassmannianData":
        return GrassmannianData(self.k, self.n, tuple(complex(v) ** p for v in self.a),
                                complex(self.hbar) ** p, complex(self.z) ** p)

    def with_z(self, z) -> "GrassmannianData":
        return replace(self, z=z)

    def yang_yang_data(self) -> YangYangData:
        return YangYangData(self.k, self.n, tuple(complex(v) for v in self.a), complex(self.hbar), complex(self.z))


@dataclass
class BetheSolution:
    roots: np.ndarray
    residual_norm: float
    path_id: object = None
    steps: int = 0
    data: GrassmannianData | None = field(default=None, repr=False)

    @property
    def eigenvalue(self) -> complex:
        return complex(np.prod(self.roots))


def bethe_residual(x, data: GrassmannianData) -> np.ndarray:
    """Left side minus z hbar^{-n/2}, one component per Bethe root."""
    x = np.asarray(x, dtype=complex)
    h = complex(data.hbar)
    a = [complex(v) for v in data.a]
    out = np.empty(len(x), dtype=complex)
    for m, xm in enumerate(x):
        val = 1 + 0j
        for aj in a:
            den = aj - h * xm
            if den == 0:
                raise PoleError(f"pole: a_j = hbar x_{m}")
            val *= (xm - aj) / den
        for l, xl in enumerate(x):
            if l == m:
                continue
            den = h * xl - xm
            if den == 0:
                raise PoleError(f"pole: x_{m} = hbar x_{l}")
            val *= (xl - h * xm) / den
        out[m] = val - data.twist
    return out


def powered_residual(x, data: GrassmannianData, p: int) -> np.ndarray:
    """The same system with x, a, hbar, z all raised to the p-th power."""
    x = np.asarray(x, dtype=complex)
    return bethe_residual(x ** p, data.powered(p))


def _cleared(x, data: GrassmannianData, c: complex):
    """Cleared-denominator system F(x) and its Jacobian, with twist c."""
    k = len(x)
    h = complex(data.hbar)
    a = np.array([complex(v) for v in data.a])
    F = np.empty(k, dtype=complex)
    J = np.zeros((k, k), dtype=complex)
    G = np.empty(k, dtype=complex)  # dF/dc
    for m in range(k):
        xm = x[m]
        # U = prod (x_m - a_j) prod_{l != m} (x_l - h x_m); V = prod (a_j - h x_m) prod (h x_l - x_m)
        fa = xm - a
        ga = a - h * xm
        others = [l for l in range(k) if l != m]
        fl = np.array([x[l] - h * xm for l in others], dtype=complex)
        gl = np.array([h * x[l] - xm for l in others], dtype=complex)
        U = np.prod(fa) * np.prod(fl)
        V = np.prod(ga) * np.prod(gl)
        F[m] = U - c * V
        G[m] = -V

        def dprod(vals, derivs):
            # derivative of a product of linear factors
            tot = 0j
            for i in range(len(vals)):
                if derivs[i] == 0:
                    continue
                tot += derivs[i] * np.prod(np.delete(vals, i))
            return tot

        allU = np.concatenate([fa, fl])
        allV = np.concatenate([ga, gl])
        # d/dx_m
        dU = dprod(allU, np.concatenate([np.ones(len(fa)), -h * np.ones(len(fl))]))
        dV = dprod(allV, np.concatenate([-h * np.ones(len(ga)), -np.ones(len(gl))]))
        J[m, m] = dU - c * dV
        for idx, l in enumerate(others):
            du = np.zeros(len(allU), dtype=complex)
            dv = np.zeros(len(allV), dtype=complex)
            du[len(fa) + idx] = 1
            dv[len(ga) + idx] = h
            J[m, l] = dprod(allU, du) - c * dprod(allV, dv)
    return F, J, G


def _newton(x, data, c, tol=1e-13, maxit=12):
    for _ in range(maxit):
        F, J, _ = _cleared(x, data, c)
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return x, False
        x = x + dx
        if np.max(np.abs(dx)) <= tol * (1 + np.max(np.abs(x))):
            return x, True
    return x, False


def _polish(x, data):
    x, _ = _newton(np.asarray(x, dtype=complex), data, data.twist, tol=1e-15, maxit=6)
    return x


def _track(start, data: GrassmannianData, path_id, max_step=0.1, min_step=1e-12):
    """Follow z(t) = t z from t = 0 to 1 by Euler prediction and Newton correction.

    A step is accepted only if the corrector moves the prediction by less than
    2% of the root scale, which keeps the path from jumping to a neighbour.
    """
    x = np.asarray(start, dtype=complex)
    c_target = data.twist
    t, dt, steps = 0.0, max_step / 2, 0
    while t < 1.0:
        dt = min(dt, 1.0 - t)
        F, J, G = _cleared(x, data, t * c_target)
        try:
            tangent = np.linalg.solve(J, -G * c_target)
        except np.linalg.LinAlgError:
            tangent = np.zeros_like(x)
        while True:
            guess = x + dt * tangent
            xn, ok = _newton(guess, data, (t + dt) * c_target, tol=1e-12, maxit=8)
            if ok and np.max(np.abs(xn - guess)) < 0.02 * (1 + np.max(np.abs(x))):
                break
            dt /= 2
            if dt < min_step:
                raise PathFailure(path_id, t)
        x, t, steps = xn, t + dt, steps + 1
        dt = min(dt * 1.5, max_step)
    return x, steps


_STEP_LADDER = (0.1, 0.02, 0.004)


def _has_collision(r, collision) -> bool:
    return any(abs(r[i] - r[j]) < collision for i, j in itertools.combinations(range(len(r)), 2))


def _track_checked(start, data, path_id, tol, collision, ladder=_STEP_LADDER):
    """Track one path, retrying with smaller steps if it ends off the admissible
    solution set (a pole of the uncleared system, a large residual, or two
    coinciding roots)."""
    sol = None
    for max_step in ladder:
        x, steps = _track(start, data, path_id, max_step)
        try:
            sol = _finish(x, data, path_id, steps)
        except PoleError:
            continue
        if sol.residual_norm <= tol and not _has_collision(sol.roots, collision):
            return sol
    if sol is None:
        raise PoleError(f"path {path_id} ends on a pole at every step size")
    return sol


def _finish(x, data, path_id, steps):
    x = _polish(x, data)
    res = float(np.max(np.abs(bethe_residual(x, data))))
    return BetheSolution(np.asarray(x), res, path_id, steps, data)


def solve_bethe(data: GrassmannianData, tol: float = 1e-10, collision: float = 1e-8) -> list[BetheSolution]:
    """All C(n, k) solutions.

    k = 1: roots of prod (x - a_j) - z hbar^{-n/2} prod (a_j - hbar x) from the
    companion matrix.  k >= 2: homotopy in z from the subsets {a_j1..a_jk}.
    """
    n, k = data.n, data.k
    expected = math.comb(n, k)
    sols = []
    if k == 1:
        c = data.twist
        h = complex(data.hbar)
        poly = np.poly1d([1.0 + 0j])
        other = np.poly1d([1.0 + 0j])
        for aj in data.a:
            poly = poly * np.poly1d([1.0, -complex(aj)])
            other = other * np.poly1d([-h, complex(aj)])
        full = poly - c * other
        roots = np.roots(full.coeffs)
        if len(roots) != expected:
            raise CountMismatch(len(roots), expected)
        for i, r in enumerate(sorted(roots, key=lambda v: (v.real, v.imag))):
            sols.append(_finish(np.array([r]), data, ("companion", i), 0))
    else:
        for subset in itertools.combinations(range(n), k):
            start = np.array([complex(data.a[j]) for j in subset])
            sols.append(_track_checked(start, data, subset, tol, collision))
        # paths that merged are re-tracked with the finest step
        for i, j in itertools.combinations(range(len(sols)), 2):
            if _set_distance(sols[i].roots, sols[j].roots) < collision:
                for idx in (i, j):
                    subset = sols[idx].path_id
                    start = np.array([complex(data.a[m]) for m in subset])
                    sols[idx] = _track_checked(start, data, subset, tol, collision, _STEP_LADDER[-1:])
    for s in sols:
        if s.residual_norm > tol:
            raise BetheError(f"solution {s.path_id} has residual {s.residual_norm:.2e} > {tol:.0e}")
        r = s.roots
        for i, j in itertools.combinations(range(len(r)), 2):
            if abs(r[i] - r[j]) < collision:
                raise RootCollision(f"roots {i}, {j} of solution {s.path_id} coincide")
    for s1, s2 in itertools.combinations(sols, 2):
        if _set_distance(s1.roots, s2.roots) < collision:
            raise RootCollision(f"paths {s1.path_id} and {s2.path_id} reach the same solution")
    if len(sols) != expected:
        raise CountMismatch(len(sols), expected)
    return sols


def _set_distance(u, v) -> float:
    best = math.inf
    for perm in itertools.permutations(range(len(v))):
        best = min(best, max(abs(u[i] - v[j]) for i, j in enumerate(perm)))
    return best


def powered_root_closure(data: GrassmannianData, p: int) -> np.ndarray:
    """All p-th roots of the k = 1 base roots at powered parameters."""
    if data.k != 1:
        raise ValueError("closure comparison is defined for k = 1")
    base = solve_bethe(data.powered(p))
    out = []
    for s in base:
        y = s.roots[0]
        r = y ** (1.0 / p) if y != 0 else 0j
        for j in range(p):
            out.append(r * cmath.exp(2j * math.pi * j / p))
    return np.array(out)


def powered_system_roots(data: GrassmannianData, p: int) -> np.ndarray:
    """Roots of the powered k = 1 polynomial in x (degree n p)."""
    if data.k != 1:
        raise ValueError("defined for k = 1")
    pd = data.powered(p)
    c = pd.twist
    hp = complex(pd.hbar)
    poly = np.poly1d([1.0 + 0j])
    other = np.poly1d([1.0 + 0j])
    xp = np.poly1d([1.0] + [0.0] * p)  # x^p
    for aj in pd.a:
        poly = poly * (xp - complex(aj))
        other = other * (complex(aj) - hp * xp)
    return np.roots((poly - c * other).coeffs)


def spectrum_frobenius_check(a1, a2, hbar_m, z, p: int, tol: float = 1e-8, root_tol: float = 1e-10) -> dict:
    """Eigenvalues of the iterated T*P^1 product at zeta_p versus Bethe
    eigenvalues at (z^p, a^p, hbar^p).

    ``hbar_m`` is the parameter of the difference operator; the Bethe system
    uses hbar = hbar_m^2.
    """
    data = GrassmannianData(1, 2, (complex(a1), complex(a2)), complex(hbar_m) ** 2, complex(z))
    bethe = [s.eigenvalue for s in solve_bethe(data.powered(p))]
    model = build_model("tpp1", complex(a1), complex(a2), complex(hbar_m))
    spectra = {}
    roots_to_try = [1] + ([2] if p >= 3 else [])
    for k in roots_to_try:
        zeta = cmath.exp(2j * math.pi * k / p)
        X = iterated_product(model, p, zeta, z=complex(z))
        spectra[k] = eigenvalues(X)
    err, _ = match_multisets(spectra[1], bethe)
    root_err = match_multisets(spectra[1], spectra[2])[0] if 2 in spectra else 0.0
    return {
        "p": p,
        "bethe": bethe,
        "product_spectrum": list(spectra[1]),
        "max_rel_error": err,
        "primitive_root_gap": root_err,
        "passed": err <= tol and root_err <= root_tol,
    }
