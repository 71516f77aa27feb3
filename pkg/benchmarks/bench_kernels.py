"""Compare the numba kernels with their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N] [--end-to-end]

Kernel rows time each function on fixed inputs after a warm-up call (so JIT
compilation is excluded).  ``--end-to-end`` also times one p-curvature check
in fresh interpreters with and without ``QKROOTS_NO_NUMBA``.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from qkroots import _kernels as K


def _inputs():
    rng = np.random.default_rng(0)
    p = 10007
    a = rng.integers(1, p, 400).astype(np.int64)
    b = rng.integers(1, p, 250).astype(np.int64)
    return {
        "fp_mul": (a, b, p),
        "fp_divmod": (np.convolve(a, b) % p, b, p),
        "fp_gcd": (K.numpy_kernels["fp_mul"](a, b[:60], p), K.numpy_kernels["fp_mul"](b, b[:60], p), p),
        "li2_series": (0.3 + 0.2j, 200),
        "bernoulli_li2": (0.4 - 0.3j, 30, np.array([1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66] + [0.0] * 25)),
        "qlog_msum": (0.2 + 0.1j, 1.1 + 0.3j, 0.999 * np.exp(1j * np.pi), 200),
    }


def bench(repeat: int) -> list:
    rows = []
    for name, args in _inputs().items():
        fast = getattr(K, name)
        slow = K.numpy_kernels[name]
        fast(*args)
        r_fast = fast(*args)
        r_slow = slow(*args)
        same = all(np.array_equal(x, y) for x, y in zip(r_fast, r_slow)) if isinstance(r_fast, tuple) else np.allclose(r_fast, r_slow, rtol=1e-12)
        t_fast = min(timeit.repeat(lambda: fast(*args), number=1, repeat=repeat))
        t_slow = min(timeit.repeat(lambda: slow(*args), number=1, repeat=repeat))
        rows.append((name, t_fast, t_slow, same))
    return rows


_E2E = ("import time, numpy as np; from qkroots.pcurvature import random_connection, p_curvature; "
        "c = random_connection(3, 7, np.random.default_rng(1)); p_curvature(c); t = time.perf_counter(); "
        "[p_curvature(random_connection(3, 7, np.random.default_rng(s))) for s in range(3)]; "
        "print(time.perf_counter() - t)")


def end_to_end() -> dict:
    out = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = {**os.environ, "QKROOTS_NO_NUMBA": flag}
        res = subprocess.run([sys.executable, "-c", _E2E], env=env, capture_output=True, text=True, check=True)
        out[label] = float(res.stdout.strip())
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)
    print(f"active backend: {K.BACKEND}")
    print(f"{'kernel':<15}{'active (s)':>14}{'numpy (s)':>14}{'speedup':>10}  agree")
    for name, tf, ts, same in bench(args.repeat):
        print(f"{name:<15}{tf:>14.2e}{ts:>14.2e}{ts / tf:>10.1f}  {same}")
    if args.end_to_end:
        e = end_to_end()
        print(f"p-curvature, 3 x (N=3, p=7): numba {e['numba']:.2f} s, numpy {e['numpy']:.2f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
