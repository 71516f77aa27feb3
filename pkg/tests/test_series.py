from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkroots.exact import linalg, q_variable
from qkroots.series import (
    SeriesError,
    TruncSeries,
    one_series,
    pochhammer_series,
    series_exp,
    series_inverse,
    series_log,
    series_mul,
    substitute_power,
)

fracs = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))
D = 5
scalar_series = st.lists(fracs, min_size=D + 1, max_size=D + 1).map(TruncSeries)


def S(*c):
    return TruncSeries([Fraction(x) for x in c])


def test_mul_example():
    assert series_mul(S(1, 1, 0), S(1, -1, 0)) == S(1, 0, -1)


def test_identity_matrix_series_is_neutral():
    x = TruncSeries([linalg.obj_array([[Fraction(i + j + k) for j in range(2)] for i in range(2)]) for k in range(3)])
    y = series_mul(one_series(2, 2), x)
    assert all(linalg.is_zero_matrix(a - b) for a, b in zip(y.coeffs, x.coeffs))


@given(scalar_series, scalar_series)
def test_mul_matches_convolution(a, b):
    conv = np.convolve(np.array(a.coeffs, dtype=object), np.array(b.coeffs, dtype=object))[: D + 1]
    assert list(series_mul(a, b).coeffs) == list(conv)


@given(scalar_series, scalar_series, scalar_series)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_order_mismatch_raises():
    with pytest.raises(SeriesError):
        S(1, 2) * S(1, 2, 3)


def test_inverse_examples():
    assert series_inverse(S(1, -1, 0, 0)) == S(1, 1, 1, 1)
    assert series_inverse(S(1, 0, 0)) == S(1, 0, 0)
    with pytest.raises(SeriesError):
        series_inverse(S(0, 1))


@given(st.lists(st.lists(fracs, min_size=4, max_size=4), min_size=4, max_size=4))
def test_matrix_inverse_multiplies_back(raw):
    coeffs = [linalg.obj_array([[r[0], r[1]], [r[2], r[3]]]) for r in raw]
    coeffs[0] = linalg.obj_array([[Fraction(1), raw[0][1]], [Fraction(0), Fraction(2)]])
    a = TruncSeries(coeffs)
    prod = series_mul(a, series_inverse(a))
    assert prod.coeffs[0][0, 0] == 1 and prod.coeffs[0][1, 1] == 1
    assert all(linalg.is_zero_matrix(c) for c in prod.coeffs[1:])


def test_substitute_power_examples():
    assert substitute_power(S(1, 1, 0), 2, 4) == S(1, 0, 1, 0, 0)
    a = S(1, 2, 3)
    assert substitute_power(a, 1) == a
    assert substitute_power(S(1, 1, 1), 3, 6) == S(1, 0, 0, 1, 0, 0, 1)
    with pytest.raises(SeriesError):
        substitute_power(a, 0)
    with pytest.raises(SeriesError):
        substitute_power(S(1, 1), 2, 6)


@given(scalar_series, scalar_series, st.integers(1, 3))
def test_substitute_power_is_multiplicative(a, b, p):
    lhs = substitute_power(a * b, p)
    rhs = substitute_power(a, p) * substitute_power(b, p)
    assert lhs == rhs


def test_pochhammer_coefficients():
    q = q_variable()
    phi = pochhammer_series(1, 3, q)
    assert phi[0] == 1
    assert phi[1] == -1 / (1 - q)
    assert phi[2] == q / ((1 - q) * (1 - q * q))


def test_pochhammer_against_truncated_product():
    qv, zv = 0.37, 0.21
    phi = pochhammer_series(1.0, 25, qv)
    prod = np.prod([1 - zv * qv ** i for i in range(200)])
    assert abs(phi.evaluate(zv) - prod) < 1e-12


def test_pochhammer_functional_equation_exact():
    q = q_variable()
    order = 6
    phi = pochhammer_series(1, order, q)
    shifted = TruncSeries(c * q ** n for n, c in enumerate(phi.coeffs))
    one_minus_z = TruncSeries([1, -1] + [0] * (order - 1))
    assert (phi - one_minus_z * shifted).is_zero()


def test_pochhammer_at_root_of_unity_raises():
    with pytest.raises(SeriesError):
        pochhammer_series(1, 3, -1)


def test_log_exp_examples():
    assert series_exp(S(0, 0, 0)) == S(1, 0, 0)
    assert series_log(S(1, 1, 0, 0)) == S(0, 1, Fraction(-1, 2), Fraction(1, 3))
    with pytest.raises(SeriesError):
        series_log(S(2, 1))
    with pytest.raises(SeriesError):
        series_exp(S(1, 1))


@given(st.lists(fracs, min_size=D, max_size=D))
def test_exp_log_round_trip(tail):
    a = TruncSeries([Fraction(1)] + tail)
    assert series_exp(series_log(a)) == a
