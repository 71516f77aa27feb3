"""One test per acceptance criterion, with the stated tolerances and runtime budgets."""
import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qkroots.bethe import (
    GrassmannianData,
    powered_root_closure,
    powered_system_roots,
    solve_bethe,
)
from qkroots.exact import CycloNum, linalg
from qkroots.frobenius import (
    compute_intertwiner,
    conjugation_check,
    first_nonzero_order,
    pole_certificate,
    series_difference_orders,
    series_is_zero,
    tpp0_closed_form,
    tpp0_intertwiner,
)
from qkroots.pcurvature import (
    log_identity_check,
    p_curvature,
    pencil_spectrum_check,
    pi_lemma_check,
    random_connection,
    root_reduction_check,
    stirling_check,
)
from qkroots.qde import (
    build_model,
    characteristic_residual,
    cohomological_limit,
    eigenvalues,
    iterated_product,
    linear_forms_equal,
    match_multisets,
    mbold_ratfun,
    printed_connection,
    qring_roots,
)
from qkroots.vertex import gradient_check, scalar_vertex_asymptotics


def _rational(rng, forbid=()):
    while True:
        v = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        if v != 0 and v not in forbid:
            return v


def _rational_params(rng):
    a1 = _rational(rng)
    a2 = _rational(rng, (a1,))
    return a1, a2, _rational(rng, (1, -1))


def _unit(rng, lo, hi):
    return float(rng.uniform(lo, hi)) * cmath.exp(2j * math.pi * float(rng.random()))


def _numeric_params(rng):
    while True:
        a1, a2 = _unit(rng, 0.5, 2), _unit(rng, 0.5, 2)
        h = _unit(rng, 0.7, 1.4)
        if abs(a1 - a2) > 0.2 and abs(h - 1) > 0.1 and abs(h + 1) > 0.1:
            return a1, a2, h, _unit(rng, 0.1, 0.5)


def _grassmannian(rng, k, n, zmax=0.3):
    while True:
        a = [_unit(rng, 0.5, 2) for _ in range(n)]
        h = _unit(rng, 0.7, 1.4)
        ok = all(abs(h ** r - 1) > 0.05 for r in range(1, 5))
        ok = ok and all(abs(a[i] - a[j]) > 0.2 and abs(a[i] - h * a[j]) > 0.1
                        for i, j in itertools.permutations(range(n), 2))
        if ok:
            return GrassmannianData(k, n, tuple(a), h, _unit(rng, 0.05, zmax))


def test_criterion_01_quadratic_relation(criterion):
    rng = np.random.default_rng(101)
    with criterion(1, "quadratic relation, 20 rational draws, exact", 1.0):
        for _ in range(20):
            a1, a2, h = _rational_params(rng)
            R = characteristic_residual(mbold_ratfun(build_model("tpp1", a1, a2, h)), a1, a2, h)
            assert linalg.is_zero_matrix(R), (a1, a2, h)


def test_criterion_02_powered_quadratic_relation(criterion):
    rng = np.random.default_rng(102)
    with criterion(2, "powered relation over Q(zeta_p)(z), p in {2,3,5}, 10 draws each", 30.0):
        for p in (2, 3, 5):
            for _ in range(10):
                a1, a2, h = _rational_params(rng)
                X = iterated_product(build_model("tpp1", a1, a2, h), p, CycloNum.zeta(p))
                assert linalg.is_zero_matrix(characteristic_residual(X, a1, a2, h, p)), (p, a1, a2, h)


def test_criterion_03_spectrum_at_roots_of_unity(criterion):
    rng = np.random.default_rng(103)
    with criterion(3, "iterated-product spectrum = powered eigenvalues, p in {2,3,5,7}, 50 draws", 10.0):
        for p in (2, 3, 5, 7):
            for _ in range(50):
                a1, a2, h, z = _numeric_params(rng)
                model = build_model("tpp1", a1, a2, h)
                spec = eigenvalues(iterated_product(model, p, cmath.exp(2j * math.pi / p), z=z))
                target = qring_roots(z ** p, a1 ** p, a2 ** p, h ** p)
                assert match_multisets(spec, target)[0] <= 1e-8, (p, a1, a2, h, z)
                if p > 2:
                    spec2 = eigenvalues(iterated_product(model, p, cmath.exp(4j * math.pi / p), z=z))
                    assert match_multisets(spec, spec2)[0] <= 1e-10


def test_criterion_04_pole_cancellation(criterion):
    with criterion(4, "pole certificate for tpp0 and tpp1, p in {2,3}, D = 2p, with positive control", 300.0):
        models = [build_model("tpp0", hbar=Fraction(7, 3)), build_model("tpp1", Fraction(2), Fraction(-3, 2), Fraction(5, 2))]
        for model in models:
            for p in (2, 3):
                cert = pole_certificate(compute_intertwiner(model, p, 2 * p))
                assert cert["passed"], (model.name, p, cert["offending"][:3])
                assert cert["control_confirmed"], (model.name, p)


def test_criterion_05_conjugation_p2(criterion):
    with criterion(5, "conjugation residual zero to z^4 over Q(zeta_2)", 300.0):
        R = conjugation_check(build_model("tpp1", Fraction(2), Fraction(-3, 2), Fraction(5, 2)), 2, 4)
        assert len(R.coeffs) == 5 and series_is_zero(R), first_nonzero_order(R)


@pytest.mark.slow
def test_criterion_05_conjugation_p3_nongating(criterion):
    with criterion(5, "conjugation residual zero to z^6 over Q(zeta_3) (non-gating)", 300.0):
        R = conjugation_check(build_model("tpp1", Fraction(2), Fraction(-3, 2), Fraction(5, 2)), 3, 6)
        assert len(R.coeffs) == 7 and series_is_zero(R), first_nonzero_order(R)


def test_criterion_06_tpp0_closed_form(criterion):
    h = Fraction(7, 2)
    with criterion(6, "tpp0 intertwiner = printed exponential product to z^12, p in {2,3,5}", 60.0):
        mismatches = {}
        for p in (2, 3, 5):
            diff = series_difference_orders(tpp0_closed_form(h, p, 12), tpp0_intertwiner(h, p, 12))
            if diff:
                mismatches[p] = diff[0]
        assert not mismatches, f"first differing z-order per p: {mismatches}"


def test_criterion_07_bethe(criterion):
    rng = np.random.default_rng(107)
    with criterion(7, "k=1,n=2 roots = qde eigenvalues; k=2,n=4 gives 6 solutions, 20 draws", 30.0):
        for _ in range(20):
            a1, a2, hm, z = _numeric_params(rng)
            sols = solve_bethe(GrassmannianData(1, 2, (a1, a2), hm * hm, z))
            ev = eigenvalues(np.array(build_model("tpp1", a1, a2, hm).M(z, 1.0), dtype=complex))
            assert match_multisets([s.eigenvalue for s in sols], ev)[0] <= 1e-10
        for _ in range(20):
            sols = solve_bethe(_grassmannian(rng, 2, 4))
            assert len(sols) == 6
            assert max(s.residual_norm for s in sols) <= 1e-10


def test_criterion_08_yang_yang(criterion):
    rng = np.random.default_rng(108)
    with criterion(8, "Yang-Yang gradient <= 1e-4 at every Bethe root", 30.0):
        for k, n in ((1, 2), (1, 3), (2, 3), (2, 4)):
            for _ in range(3):
                data = _grassmannian(rng, k, n)
                for s in solve_bethe(data):
                    assert gradient_check(s.roots, data.yang_yang_data()) <= 1e-4, (k, n)


def test_criterion_09_powered_bethe(criterion):
    rng = np.random.default_rng(109)
    with criterion(9, "powered k=1,n=2 roots = square roots of powered base roots, p=2", 5.0):
        for _ in range(10):
            data = _grassmannian(rng, 1, 2)
            closure = powered_root_closure(data, 2)
            direct = powered_system_roots(data, 2)
            assert len(direct) == 4 and match_multisets(direct, closure)[0] <= 1e-8


def test_criterion_10_vertex_asymptotics(criterion):
    rng = np.random.default_rng(110)
    with criterion(10, "scalar vertex asymptotics, rel error <= 2e-2 at eps=1e-3, monotone", 5.0):
        for _ in range(5):
            # series-dominated disc, hbar away from +-1 where the target z^2 (1 - hbar^2) degenerates
            while True:
                z, h = _unit(rng, 0.2, 0.3), _unit(rng, 0.5, 1.4)
                if abs(h * z) <= 0.3 and min(abs(h - 1), abs(h + 1)) >= 0.6:
                    break
            errs = {}
            for eps in (1e-2, 3e-3, 1e-3):
                for name, c in scalar_vertex_asymptotics(h, z, 2, eps)["cases"].items():
                    errs.setdefault(name, []).append(c["rel_error"])
            for name, e in errs.items():
                assert e[-1] <= 2e-2, (name, e)
                assert e[0] > e[1] > e[2], (name, e)


def test_criterion_11_p_curvature_structure(criterion):
    rng = np.random.default_rng(111)
    with criterion(11, "p-curvature structure and log identity, 20 connections per (N, p)", 120.0):
        for n in (2, 3):
            for p in (2, 3, 5, 7):
                for _ in range(20):
                    conn = random_connection(n, p, rng)
                    p_curvature(conn)
                    assert log_identity_check(conn)["passed"], (n, p)


def test_criterion_12_stirling(criterion):
    with criterion(12, "Stirling row p vanishes mod p inside, p <= 23", 1.0):
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
            assert stirling_check(p)["passed"], p


def test_criterion_13_pi_lemma(criterion):
    rng = np.random.default_rng(113)
    with criterion(13, "pi-adic valuation >= p+1, 20 integer-matrix pairs, p in {3,5}", 30.0):
        for p in (3, 5):
            for i in range(20):
                n = 2 + i % 2
                r = pi_lemma_check(p, rng.integers(-5, 6, (n, n)).tolist(), rng.integers(-5, 6, (n, n)).tolist())
                assert r["valuation"] >= p + 1, (p, r["offending"])


def test_criterion_14_pencil_spectrum(criterion):
    rng = np.random.default_rng(114)
    with criterion(14, "pencil charpolys equal, exhaustive p in {2,3}, 20 draws p=5", 300.0):
        for p in (2, 3):
            for u1, u2, h in itertools.product(range(p), range(p), range(1, p)):
                if u1 != u2:
                    assert pencil_spectrum_check(p, u1, u2, h)["passed"], (p, u1, u2, h)
        for _ in range(20):
            u1 = int(rng.integers(0, 5))
            u2 = int((u1 + rng.integers(1, 5)) % 5)
            h = int(rng.integers(1, 5))
            assert pencil_spectrum_check(5, u1, u2, h)["passed"], (u1, u2, h)


def test_criterion_15_root_reduction(criterion):
    with criterion(15, "root reduction p=2, D_z=2 agrees; disagreements become findings", 300.0):
        for u1, u2, h in ((0, 1, 1), (1, 0, 1)):
            r = root_reduction_check(2, u1, u2, h, D_z=2)
            assert r["status"] == "pass" and r["digits_agree"], r
        r = root_reduction_check(3, 1, 2, 1, D_z=2, h_scale=1)
        assert r["status"] == "finding" and r["fallback_charpoly"] is not None


def test_criterion_16_cohomological_limit(criterion):
    with criterion(16, "cohomological limit matches exactly one of {h, 2h}", 1.0):
        C = cohomological_limit()
        matches = [name for name, s in (("h", 1), ("2h", 2)) if linear_forms_equal(C, printed_connection(s))]
        assert matches == ["2h"]
