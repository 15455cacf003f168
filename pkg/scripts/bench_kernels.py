#!/usr/bin/env python3
"""Benchmark the compiled exponential-multiply kernels against the numpy
fallback, plus the eigendecomposition path used for d >= 3.

Usage: python scripts/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from lohe import _kernels, _kernels_py
from lohe.matcore import Rng, sample_gaussian_su, sample_haar


def timeit(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    print(f"kernel backend: {_kernels.BACKEND}")
    print(f"{'case':>18} {'dispatch':>12} {'numpy':>12} {'speedup':>9}")
    rng = Rng(0)
    cases = [(1, 16), (1, 256), (2, 16), (2, 64), (2, 512), (2, 4096), (4, 16), (4, 256)]
    for d, n in cases:
        a = sample_gaussian_su(rng.split("a", d, n), d, size=n)
        u = sample_haar(rng.split("u", d, n), d, size=n)
        t_dispatch = timeit(lambda: _kernels.expmul_batch(a, u, 1e-3), args.repeats)
        t_numpy = timeit(lambda: _kernels_py.expmul_batch(a, u, 1e-3), args.repeats)
        err = np.abs(_kernels.expmul_batch(a, u, 1e-3)
                     - _kernels_py.expmul_batch(a, u, 1e-3)).max()
        assert err < 1e-13, f"backend mismatch {err:.2e}"
        print(f"{f'd={d} n={n}':>18} {t_dispatch * 1e6:>10.1f}us "
              f"{t_numpy * 1e6:>10.1f}us {t_numpy / t_dispatch:>8.1f}x")


if __name__ == "__main__":
    main()
