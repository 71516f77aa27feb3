import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from qkroots.exact import CycloNum, linalg
from qkroots.frobenius import (
    CertificateError,
    compute_intertwiner,
    conjugation_check,
    first_nonzero_order,
    frobenius_gauge,
    numeric_limit_gap,
    pole_certificate,
    ratfun_at_zeta,
    reduce_at_zeta,
    series_difference_orders,
    series_is_zero,
    tpp0_closed_form,
    tpp0_intertwiner,
)
from qkroots.qde import build_model


@pytest.fixture(scope="module")
def tpp1_p2():
    return compute_intertwiner(build_model("tpp1", 2, 3, 5), 2)


@pytest.mark.parametrize("p", [2, 3])
def test_gauge_is_unit_lower_and_conjugates(p):
    m = build_model("tpp1", 2, -3, Fraction(5, 2))
    G = frobenius_gauge(m, p)
    assert G[0, 0] == 1 and G[1, 1] == 1 and G[0, 1] == 0
    Lp = linalg.matmul(m.L, m.L)
    for _ in range(p - 2):
        Lp = linalg.matmul(Lp, m.L)
    lhs = linalg.matmul(linalg.matmul(G, Lp), linalg.inverse(G))
    assert linalg.is_zero_matrix(lhs - m.powered(p).L)


def test_scalar_gauge_is_trivial():
    G = frobenius_gauge(build_model("tpp0", hbar=3), 3)
    assert G.shape == (1, 1) and G[0, 0] == 1


def test_pole_certificate_tpp1(tpp1_p2):
    cert = pole_certificate(tpp1_p2)
    assert cert["passed"] and not cert["offending"]
    assert cert["control_confirmed"]
    assert len(cert["entries"]) == 4 * (tpp1_p2.order + 1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_pole_certificate_tpp0(p):
    cert = pole_certificate(compute_intertwiner(build_model("tpp0", hbar=Fraction(7, 3)), p))
    assert cert["passed"] and cert["control_confirmed"]


def test_literal_ratio_has_poles():
    F = compute_intertwiner(build_model("tpp1", 2, 3, 5), 2, gauge="none")
    cert = pole_certificate(F)
    assert not cert["passed"]
    assert min(c["degree"] for c in cert["offending"]) == 2


def test_wrong_q_power_has_poles():
    F = compute_intertwiner(build_model("tpp0", hbar=3), 2, q_power=2)
    assert not pole_certificate(F)["passed"]


def test_reduced_certificate_rejected(tpp1_p2):
    with pytest.raises(ValueError):
        pole_certificate(reduce_at_zeta(tpp1_p2))


def test_ratfun_at_zeta_detects_pole():
    F = compute_intertwiner(build_model("tpp0", hbar=3), 2)
    ratfun_at_zeta(F.psi[1][0, 0], 2)
    with pytest.raises(CertificateError):
        ratfun_at_zeta(F.psi[2][0, 0], 2)


def test_reduction_first_coefficient():
    # F_1 = Psi_1 = (hbar - 1)/(q - 1); at q = -1 this is (1 - hbar)/2
    h = Fraction(3)
    F = reduce_at_zeta(compute_intertwiner(build_model("tpp0", hbar=h), 2))
    assert F.F[0][0, 0] == CycloNum.from_scalar(1, 2)
    assert F.F[1][0, 0] == CycloNum.from_scalar((1 - h) / 2, 2)


def test_reduction_numeric_limit(tpp1_p2):
    assert numeric_limit_gap(tpp1_p2) < 1e-4


def test_galois_conjugate_reduction():
    F = compute_intertwiner(build_model("tpp0", hbar=Fraction(5, 2)), 3)
    r1, r2 = reduce_at_zeta(F, 1), reduce_at_zeta(F, 2)
    for a, b in zip(r1.F.coeffs, r2.F.coeffs):
        assert a[0, 0].galois(2) == b[0, 0]


def test_numeric_reduction_against_direct_evaluation():
    h, p, z, offset = 2.5, 3, 0.05, 1e-3
    q = cmath.exp(2j * math.pi / p) * (1 - offset)
    F = reduce_at_zeta(compute_intertwiner(build_model("tpp0", hbar=Fraction(5, 2)), p, 8))
    # Psi(z) = prod_k (1 - hbar z q^k)/(1 - z q^k); the log of the ratio stays finite
    k = np.arange(60000)
    qk = q ** k
    qpk = (q ** (p * p)) ** k
    log_ratio = np.sum(np.log1p(-h * z * qk) - np.log1p(-z * qk))
    log_ratio -= np.sum(np.log1p(-h ** p * z ** p * qpk) - np.log1p(-z ** p * qpk))
    series = sum(c[0, 0].to_complex() * z ** d for d, c in enumerate(F.F.coeffs))
    assert abs(cmath.exp(log_ratio) - series) < 1e-3


@pytest.mark.parametrize("p", [2, 3])
def test_conjugation_iterate_vanishes(p):
    m = build_model("tpp1", 2, 3, 5)
    assert series_is_zero(conjugation_check(m, p))


def test_conjugation_literal_fails_at_first_order():
    m = build_model("tpp1", 2, 3, 5)
    R = conjugation_check(m, 2, product="literal")
    assert first_nonzero_order(R) == 1


def test_conjugation_scalar():
    m = build_model("tpp0", hbar=Fraction(4, 3))
    assert series_is_zero(conjugation_check(m, 5, 10))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_closed_form_corrected_matches(p):
    h = Fraction(7, 2)
    D = 2 * p + 1
    assert series_difference_orders(tpp0_closed_form(h, p, D, corrected=True), tpp0_intertwiner(h, p, D)) == []


@pytest.mark.parametrize("p", [2, 3])
def test_closed_form_printed_differs_from_z_p(p):
    h = Fraction(7, 2)
    D = 2 * p
    diff = series_difference_orders(tpp0_closed_form(h, p, D), tpp0_intertwiner(h, p, D))
    assert diff and diff[0] == p


def test_closed_form_trivial_at_hbar_one_limit():
    # hbar = 1 makes every exponent vanish
    s = tpp0_closed_form(1, 3, 6, corrected=True)
    assert s[0] == CycloNum.from_scalar(1, 3)
    assert all(c.is_zero() for c in s.coeffs[1:])
