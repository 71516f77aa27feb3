import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkroots import _kernels as K

P = 10007
polys = st.lists(st.integers(0, P - 1), min_size=1, max_size=40).map(lambda v: np.array(v + [1], dtype=np.int64))


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def test_backend_flag():
    assert K.BACKEND in ("numba", "numpy")
    assert set(K.numpy_kernels) == {"fp_mul", "fp_divmod", "fp_gcd", "li2_series", "bernoulli_li2", "qlog_msum"}


@settings(max_examples=30)
@given(polys, polys)
def test_fp_kernels_agree(a, b):
    for name, args in (("fp_mul", (a, b, P)), ("fp_divmod", (a, b, P)), ("fp_gcd", (a, b, P))):
        assert _same(getattr(K, name)(*args), K.numpy_kernels[name](*args)), name


def test_fp_mul_large_prime_no_overflow():
    p = (1 << 31) - 1
    a = np.full(50, p - 1, dtype=np.int64)
    got = K.fp_mul(a, a, p)
    want = [(50 - abs(49 - k)) * (p - 1) ** 2 % p for k in range(99)]
    assert got.tolist() == want


def test_fp_mul_matches_convolution():
    a = np.array([1, 2, 3], dtype=np.int64)
    b = np.array([4, 5], dtype=np.int64)
    assert K.fp_mul(a, b, 7).tolist() == [4, 13 % 7, 22 % 7, 15 % 7]


@pytest.mark.parametrize("w", [0.3 + 0.2j, -0.45, 0.1j])
def test_complex_kernels_agree(w):
    assert abs(K.li2_series(w, 60) - K.numpy_kernels["li2_series"](w, 60)) < 1e-14
    b = np.array([1 / 6, -1 / 30, 1 / 42, -1 / 30])
    assert abs(K.bernoulli_li2(w, 4, b) - K.numpy_kernels["bernoulli_li2"](w, 4, b)) < 1e-14
    q = 0.9 * np.exp(0.3j)
    assert abs(K.qlog_msum(w / 2, 1.2, q, 150) - K.numpy_kernels["qlog_msum"](w / 2, 1.2, q, 150)) < 1e-12


def test_fallback_selected_by_environment():
    env = dict(os.environ, QKROOTS_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from qkroots import _kernels as K; print(K.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
