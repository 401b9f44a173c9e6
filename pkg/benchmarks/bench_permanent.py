"""Timing comparison of the permanent backends: compiled Ryser kernel vs
the pure-Python fallback (and the brute permutation sum at tiny sizes).

Run:  python3 benchmarks/bench_permanent.py [max_n]
"""

import sys
import time
from itertools import permutations

import numpy as np

from focktrace import _ryser_py

try:
    from focktrace import _ryser
except ImportError:
    _ryser = None


def permutation_sum(a):
    n = a.shape[0]
    return sum(np.prod(a[range(n), p]) for p in permutations(range(n)))


def timed(fn, arg, repeat):
    best = float("inf")
    value = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn(arg)
        best = min(best, time.perf_counter() - t0)
    return value, best


def main(max_n=16):
    rng = np.random.default_rng(0)
    print(f"{'n':>3} {'cython':>12} {'python':>12} {'speedup':>9}   agreement")
    for n in range(2, max_n + 1):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        repeat = 5 if n <= 12 else 1
        v_py, t_py = timed(lambda m: _ryser_py.permanent(m.tolist()), a, repeat)
        if _ryser is not None:
            v_cy, t_cy = timed(
                lambda m: _ryser.permanent(np.ascontiguousarray(m)), a, repeat)
        else:
            v_cy, t_cy = v_py, float("nan")
        rel = abs(v_cy - v_py) / max(1.0, abs(v_py))
        if n <= 8:
            rel = max(rel, abs(v_cy - permutation_sum(a)) / max(1.0, abs(v_cy)))
        print(f"{n:>3} {t_cy:>12.3e} {t_py:>12.3e} {t_py / t_cy:>9.1f}   {rel:.1e}")
    if _ryser is None:
        print("compiled kernel not built; showing fallback only")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 16)
