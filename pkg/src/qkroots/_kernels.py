"""Hot inner loops: polynomial arithmetic over F_p and complex series sums.

Every kernel exists twice: a plain numpy/python body, and the same body
compiled with ``numba.njit``.  The compiled path is used unless the
environment variable ``QKROOTS_NO_NUMBA`` is set to a non-empty value other
than ``0`` (or numba is not importable).  Both paths return identical
results; ``benchmarks/bench_kernels.py`` compares their speed.
"""
from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("QKROOTS_NO_NUMBA", "")
DISABLE_NUMBA = bool(_flag) and _flag != "0"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    DISABLE_NUMBA = True


# ---------------------------------------------------------------------------
# F_p[z] kernels.  Polynomials are int64 arrays, lowest degree first, with
# no trailing zeros (the empty array is the zero polynomial).  p < 2**31.
# ---------------------------------------------------------------------------

def _inv_mod(a, p):
    # Fermat inverse; a is assumed nonzero mod p
    r = 1
    b = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


def _trim(a):
    n = a.shape[0]
    while n > 0 and a[n - 1] == 0:
        n -= 1
    return a[:n].copy()


def _fp_mul(a, b, p):
    na = a.shape[0]
    nb = b.shape[0]
    if na == 0 or nb == 0:
        return np.zeros(0, dtype=np.int64)
    out = np.zeros(na + nb - 1, dtype=np.int64)
    # reduce once at the end when the accumulated sums cannot overflow
    lazy = (p - 1) * (p - 1) * min(na, nb) < 2**62 if p < 2**20 else False
    for i in range(na):
        ai = a[i]
        if ai == 0:
            continue
        if lazy:
            for j in range(nb):
                out[i + j] += ai * b[j]
        else:
            for j in range(nb):
                out[i + j] = (out[i + j] + ai * b[j]) % p
    if lazy:
        for k in range(out.shape[0]):
            out[k] %= p
    return _trim(out)


def _fp_divmod(a, b, p):
    nb = b.shape[0]
    na = a.shape[0]
    if na < nb:
        return np.zeros(0, dtype=np.int64), a.copy()
    r = a.copy()
    qt = np.zeros(na - nb + 1, dtype=np.int64)
    inv = _inv_mod(b[nb - 1], p)
    for k in range(na - nb, -1, -1):
        c = (r[k + nb - 1] * inv) % p
        qt[k] = c
        if c != 0:
            for j in range(nb):
                r[k + j] = (r[k + j] - c * b[j]) % p
    return _trim(qt), _trim(r[: nb - 1] if nb > 1 else r[:0])


def _fp_monic(a, p):
    if a.shape[0] == 0:
        return a.copy()
    inv = _inv_mod(a[a.shape[0] - 1], p)
    out = np.empty_like(a)
    for i in range(a.shape[0]):
        out[i] = (a[i] * inv) % p
    return out


def _fp_gcd(a, b, p):
    x = _trim(a)
    y = _trim(b)
    while y.shape[0] > 0:
        _, rr = _fp_divmod(x, y, p)
        x = y
        y = rr
    return _fp_monic(x, p)


# numpy-vectorised fallbacks (used when numba is disabled); same contracts

def _np_fp_mul(a, b, p):
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return _np_trim(np.convolve(a, b) % p)


def _np_trim(a):
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return np.zeros(0, dtype=np.int64)
    return a[: nz[-1] + 1].astype(np.int64, copy=True)


def _np_fp_divmod(a, b, p):
    nb = b.shape[0]
    na = a.shape[0]
    if na < nb:
        return np.zeros(0, dtype=np.int64), a.copy()
    r = a.astype(np.int64, copy=True)
    qt = np.zeros(na - nb + 1, dtype=np.int64)
    inv = pow(int(b[-1]), p - 2, p)
    for k in range(na - nb, -1, -1):
        c = (int(r[k + nb - 1]) * inv) % p
        qt[k] = c
        if c:
            r[k : k + nb] = (r[k : k + nb] - c * b) % p
    return _np_trim(qt), _np_trim(r[: nb - 1])


def _np_fp_monic(a, p):
    if a.shape[0] == 0:
        return a.copy()
    return (a * pow(int(a[-1]), p - 2, p)) % p


def _np_fp_gcd(a, b, p):
    x, y = _np_trim(a), _np_trim(b)
    while y.shape[0]:
        x, y = y, _np_fp_divmod(x, y, p)[1]
    return _np_fp_monic(x, p)


# ---------------------------------------------------------------------------
# Complex series kernels
# ---------------------------------------------------------------------------

def _li2_series(w, nterms):
    # sum_{m>=1} w^m / m^2, summed from the tail for accuracy
    acc = 0j
    for m in range(nterms, 0, -1):
        acc = acc * w + 1.0 / (m * m)
    return acc * w


def _bernoulli_li2(u, nterms, b2n):
    # Li2(1 - exp(-u)) = sum_{n>=0} B_n u^{n+1}/(n+1)!  (B_1 = -1/2 variant)
    acc = u - u * u / 4.0
    upow = u
    fact = 1.0
    for k in range(1, nterms + 1):
        n = 2 * k
        upow = upow * u * u
        fact = fact * n * (n + 1)
        acc += b2n[k - 1] * upow / fact
    return acc


def _qlog_msum(z, hbar, q, mmax):
    # sum_{m=1}^{mmax} (z^m - (hbar z)^m) / (m (1 - q^m))
    acc = 0j
    zm = 1.0 + 0j
    hzm = 1.0 + 0j
    qm = 1.0 + 0j
    hz = hbar * z
    for m in range(1, mmax + 1):
        zm *= z
        hzm *= hz
        qm *= q
        acc += (zm - hzm) / (m * (1.0 - qm))
    return acc


def _np_li2_series(w, nterms):
    m = np.arange(1, nterms + 1, dtype=np.float64)
    return complex(np.sum(np.power(complex(w), m) / (m * m)))


def _np_bernoulli_li2(u, nterms, b2n):
    k = np.arange(1, nterms + 1)
    n = 2 * k
    fact = np.cumprod((n * (n + 1)).astype(np.float64))
    upow = np.power(complex(u), n + 1)
    return complex(u - u * u / 4.0 + np.sum(b2n[:nterms] * upow / fact))


def _np_qlog_msum(z, hbar, q, mmax):
    m = np.arange(1, mmax + 1)
    z, hbar, q = complex(z), complex(hbar), complex(q)
    return complex(np.sum((z**m - (hbar * z) ** m) / (m * (1.0 - q**m))))


if DISABLE_NUMBA:
    fp_mul, fp_divmod, fp_gcd, fp_monic = _np_fp_mul, _np_fp_divmod, _np_fp_gcd, _np_fp_monic
    li2_series, bernoulli_li2, qlog_msum = _np_li2_series, _np_bernoulli_li2, _np_qlog_msum
else:
    _jit = numba.njit(cache=True, nogil=True)
    _inv_mod = _jit(_inv_mod)
    _trim = _jit(_trim)
    fp_mul = _jit(_fp_mul)
    fp_divmod = _fp_divmod = _jit(_fp_divmod)
    fp_monic = _fp_monic = _jit(_fp_monic)
    fp_gcd = _jit(_fp_gcd)
    li2_series = _jit(_li2_series)
    bernoulli_li2 = _jit(_bernoulli_li2)
    qlog_msum = _jit(_qlog_msum)

BACKEND = "numpy" if DISABLE_NUMBA else "numba"

# Pure numpy twins, importable regardless of the flag (benchmarks, tests).
numpy_kernels = {
    "fp_mul": _np_fp_mul,
    "fp_divmod": _np_fp_divmod,
    "fp_gcd": _np_fp_gcd,
    "li2_series": _np_li2_series,
    "bernoulli_li2": _np_bernoulli_li2,
    "qlog_msum": _np_qlog_msum,
}
