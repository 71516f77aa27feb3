import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qkroots.bethe import (
    GrassmannianData,
    PoleError,
    bethe_residual,
    powered_residual,
    powered_root_closure,
    powered_system_roots,
    solve_bethe,
    spectrum_frobenius_check,
)
from qkroots.qde import build_model, eigenvalues, match_multisets, qring_roots


def _data(k, n, z=0.08 - 0.05j, hbar=1.6 * cmath.exp(0.25j)):
    a = tuple(complex(1 + 0.7 * j, 0.3 * (-1) ** j) for j in range(n))
    return GrassmannianData(k, n, a, hbar, z)


def _direct_residual(x, a, h, z, n):
    # written out independently of the library
    out = []
    for m, xm in enumerate(x):
        lhs = 1
        for aj in a:
            lhs *= (xm - aj) / (aj - h * xm)
        for l, xl in enumerate(x):
            if l != m:
                lhs *= (xl - h * xm) / (h * xl - xm)
        out.append(lhs - z / cmath.sqrt(h) ** n)
    return np.array(out)


def test_validation():
    with pytest.raises(ValueError):
        GrassmannianData(1, 2, (1, 1), 2.0, 0.1)
    with pytest.raises(ValueError):
        GrassmannianData(1, 2, (1, 2), -1.0, 0.1)
    with pytest.raises(ValueError):
        GrassmannianData(1, 2, (1, 2), 1j, 0.1)
    with pytest.raises(ValueError):
        GrassmannianData(3, 2, (1, 2), 2.0, 0.1)


def test_residual_pole():
    d = GrassmannianData(1, 2, (2.0, 3.0), 2.0, 0.1)
    with pytest.raises(PoleError):
        bethe_residual([1.0], d)


def test_z_zero_roots_are_evaluation_parameters():
    d = GrassmannianData(1, 2, (2.0, 3.0), 1.7, 0.0)
    roots = sorted(s.roots[0].real for s in solve_bethe(d))
    assert np.allclose(roots, [2.0, 3.0])


@pytest.mark.parametrize("k,n", [(1, 2), (1, 4), (2, 3), (2, 4), (3, 5)])
def test_solution_count_and_residual(k, n):
    d = _data(k, n)
    sols = solve_bethe(d)
    assert len(sols) == math.comb(n, k)
    for s in sols:
        assert np.max(np.abs(_direct_residual(s.roots, d.a, d.hbar, d.z, n))) < 1e-10
    for s1, s2 in itertools.combinations(sols, 2):
        assert match_multisets(s1.roots, s2.roots)[0] > 1e-6


def test_paths_start_at_subsets():
    d = _data(2, 4, z=1e-6)
    for s in solve_bethe(d):
        start = [d.a[j] for j in s.path_id]
        assert match_multisets(s.roots, start)[0] < 1e-4


@pytest.mark.parametrize("hm", [1.3, 0.7 + 0.4j, 2.1j + 0.2])
def test_k1_n2_matches_quantum_ring(hm):
    a1, a2, z = 1.4 + 0.2j, -0.6, 0.11 + 0.04j
    d = GrassmannianData(1, 2, (a1, a2), hm ** 2, z)
    bethe = [s.eigenvalue for s in solve_bethe(d)]
    assert match_multisets(bethe, qring_roots(z, a1, a2, hm))[0] < 1e-10
    M = np.array(build_model("tpp1", a1, a2, hm).M(z, 1.0), dtype=complex)
    assert match_multisets(bethe, eigenvalues(M))[0] < 1e-10


@settings(max_examples=20)
@given(st.floats(0.3, 3), st.floats(0, 6.2), st.floats(0.01, 0.3), st.floats(0, 6.2))
def test_k1_random_parameters(rh, th, rz, tz):
    h = rh * cmath.exp(1j * th)
    assume(all(abs(h ** r - 1) > 1e-2 for r in range(1, 5)))
    d = GrassmannianData(1, 3, (1.0, -0.5 + 1j, 2.5), h, rz * cmath.exp(1j * tz))
    for s in solve_bethe(d):
        assert np.max(np.abs(_direct_residual(s.roots, d.a, d.hbar, d.z, 3))) < 1e-8


@pytest.mark.parametrize("p", [2, 3])
def test_powered_roots_closure(p):
    d = _data(1, 2)
    closure = powered_root_closure(d, p)
    direct = powered_system_roots(d, p)
    assert len(closure) == len(direct) == 2 * p
    assert match_multisets(closure, direct)[0] < 1e-9
    for x in closure:
        assert np.max(np.abs(powered_residual([x], d, p))) < 1e-8


def test_closure_needs_k1():
    with pytest.raises(ValueError):
        powered_root_closure(_data(2, 3), 2)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_spectrum_frobenius(p):
    r = spectrum_frobenius_check(1.3 + 0.2j, -0.8, 1.25 * cmath.exp(0.2j), 0.09 + 0.02j, p)
    assert r["passed"], r
    assert len(r["bethe"]) == 2


def test_spectrum_frobenius_negative_control():
    # the wrong Bethe hbar (hbar_M instead of hbar_M^2) must not match
    a1, a2, hm, z, p = 1.3, -0.8, 1.25, 0.09, 2
    d = GrassmannianData(1, 2, (a1, a2), hm, z).powered(p)
    wrong = [s.eigenvalue for s in solve_bethe(d)]
    X = eigenvalues(__import__("qkroots.qde", fromlist=["iterated_product"]).iterated_product(
        build_model("tpp1", a1, a2, hm), p, -1.0, z=z))
    assert match_multisets(X, wrong)[0] > 1e-3
