import cmath
import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from qkroots.bethe import GrassmannianData, solve_bethe
from qkroots.vertex import (
    BranchCutError,
    YangYangData,
    _bernoulli_even,
    dilog,
    gradient_check,
    qlog_psi,
    scalar_vertex_asymptotics,
    yang_yang,
)

complexes = st.builds(
    lambda r, t: r * cmath.exp(1j * t),
    st.floats(0.01, 5.0),
    st.floats(-3.1, 3.1),
)


def _mp(w):
    return complex(mpmath.polylog(2, w))


# dilogarithm -------------------------------------------------------------------------------
@pytest.mark.parametrize("w", [0.3, -0.9, 0.5 + 0.5j, 0.99j, -1, 0.7 - 0.6j, 2 + 1j, -5, 3j, -0.4 + 2j])
def test_dilog_matches_mpmath(w):
    assert abs(dilog(w) - _mp(w)) < 1e-13 * max(1, abs(_mp(w)))


def test_dilog_special_values():
    assert dilog(0) == 0
    assert abs(dilog(1) - math.pi ** 2 / 6) < 1e-15
    assert abs(dilog(-1) + math.pi ** 2 / 12) < 1e-14
    assert abs(dilog(0.5) - (math.pi ** 2 / 12 - math.log(2) ** 2 / 2)) < 1e-14


@given(complexes)
def test_dilog_against_mpmath_property(w):
    assume(abs(w.imag) > 1e-6 or w.real < 1)
    ref = _mp(w)
    assert abs(dilog(w) - ref) < 1e-11 * max(1, abs(ref))


@given(complexes)
def test_inversion_identity(w):
    assume(abs(w.imag) > 1e-3)
    lg = cmath.log(-w)
    assert abs(dilog(w) + dilog(1 / w) + math.pi ** 2 / 6 + lg * lg / 2) < 1e-10


@given(complexes)
def test_reflection_identity(w):
    assume(abs(w.imag) > 1e-3 and abs(w - 1) > 1e-3)
    lhs = dilog(w) + dilog(1 - w)
    assert abs(lhs - (math.pi ** 2 / 6 - cmath.log(w) * cmath.log(1 - w))) < 1e-10


def test_branch_cut_rejected():
    with pytest.raises(BranchCutError):
        dilog(2.0)
    assert dilog(complex(2.0, 1e-12)) is not None


def test_bernoulli_numbers_against_sympy():
    got = _bernoulli_even(10)
    want = [float(sympy.bernoulli(2 * k)) for k in range(1, 11)]
    assert np.allclose(got, want, rtol=1e-15)


# Yang-Yang function ---------------------------------------------------------------------
def _grass(k, n, z=0.07 + 0.03j):
    a = tuple(1.0 + 0.6 * j + 0.25j * (j % 2) for j in range(n))
    return GrassmannianData(k, n, a, 1.7 * cmath.exp(0.3j), z)


def test_polarization_size():
    yy = YangYangData(2, 4, (1, 2, 3, 4), 1.5, 0.1)
    assert len(yy.polarization()) == 2 * 4 + 2 * 2


def test_yang_yang_rejects_bad_shapes():
    with pytest.raises(ValueError):
        YangYangData(3, 2, (1, 2), 1.5, 0.1)
    with pytest.raises(ValueError):
        YangYangData(1, 2, (1, 2), 1.5, 0.1, sqrt_sign=2)
    with pytest.raises(ValueError):
        yang_yang([1.0, 2.0], YangYangData(1, 2, (1, 2), 1.5, 0.1))


def test_z_sharp_square_root_branch():
    y = YangYangData(1, 3, (1, 2, 3), 4.0, 0.5)
    assert abs(y.z_sharp - 0.5 * (-2.0) ** -3) < 1e-15
    flipped = YangYangData(1, 3, (1, 2, 3), 4.0, 0.5, sqrt_sign=-1)
    assert abs(flipped.z_sharp + y.z_sharp) < 1e-15


@pytest.mark.parametrize("k,n", [(1, 2), (1, 3), (2, 3), (2, 4)])
def test_bethe_roots_are_critical_points(k, n):
    data = _grass(k, n)
    for sol in solve_bethe(data):
        assert gradient_check(sol.roots, data.yang_yang_data()) < 1e-6


@pytest.mark.parametrize("k,n", [(1, 2), (2, 4)])
def test_perturbed_roots_are_not_critical(k, n):
    data = _grass(k, n)
    sol = solve_bethe(data)[0]
    x = sol.roots * (1 + 1e-2)
    assert gradient_check(x, data.yang_yang_data()) > 1e-3


def test_gradient_check_refuses_z_zero():
    data = _grass(1, 2, z=0)
    with pytest.raises(ValueError):
        gradient_check([1.0], data.yang_yang_data())


# scalar vertex asymptotics -------------------------------------------------------------
def test_qlog_psi_matches_product():
    z, h, q = 0.2 + 0.1j, 1.3 - 0.2j, 0.5 * cmath.exp(1j)
    prod = 1
    for k in range(200):
        prod *= (1 - h * z * q ** k) / (1 - z * q ** k)
    assert abs(cmath.exp(qlog_psi(z, h, q)) - prod) < 1e-12


def test_qlog_psi_domain():
    with pytest.raises(ValueError):
        qlog_psi(1.2, 0.5, 0.3)


def test_asymptotics_converge_p2():
    h, z = 1.2 * cmath.exp(0.4j), 0.15 * cmath.exp(-0.7j)
    errs = {}
    for eps in (1e-2, 1e-3):
        for name, c in scalar_vertex_asymptotics(h, z, 2, eps)["cases"].items():
            errs.setdefault(name, []).append(c["rel_error"])
    for name, (coarse, fine) in errs.items():
        assert fine < coarse and fine < 2e-2, name


@pytest.mark.parametrize("p", [3, 5])
def test_asymptotics_error_shrinks_linearly(p):
    # the target is O(z^p), so only the rate is checked for larger p
    h, z = 1.2 * cmath.exp(0.4j), 0.15 * cmath.exp(-0.7j)
    for name in ("q_to_1", "q_to_zeta", "powered_q_to_zeta"):
        r = [scalar_vertex_asymptotics(h, z, p, e)["cases"][name]["rel_error"] for e in (1e-3, 1e-4)]
        assert r[1] < r[0] / 5, name


def test_asymptotics_rate_is_linear():
    h, z = 0.8, 0.2
    r = [scalar_vertex_asymptotics(h, z, 3, e)["cases"]["q_to_zeta"]["rel_error"] for e in (1e-2, 1e-3)]
    assert 5 < r[0] / r[1] < 20


def test_asymptotics_domain():
    with pytest.raises(ValueError):
        scalar_vertex_asymptotics(1.0, 0.5, 2, 1e-3)
