#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy/big-integer
fallback. Run after an editable install:

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from threeprimes import kernels
from threeprimes.residues import units


def timeit(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not kernels.HAVE_COMPILED:
        print("compiled kernels unavailable; nothing to compare")
        return

    residues = units(15)
    patterns = ((3, 6, 7), (4, 5, 7), (4, 6, 6), (5, 5, 6))
    rng = np.random.default_rng(0)

    v_grid = rng.integers(0, 17, size=(20_000, 8), dtype=np.int64)
    seq6 = np.sort(rng.random((100_000, 6)))[:, ::-1].copy()
    asym10 = [np.sort(rng.random((20_000, 10)))[:, ::-1].copy() for _ in range(3)]
    n_big = 20011
    tri = [rng.random(n_big) * (rng.random(n_big) < 0.1) for _ in range(3)]

    cases = [
        (
            "base case, four patterns (186,592 triples)",
            lambda be: kernels.base_case_four_patterns(residues, 15, patterns, backend=be),
        ),
        (
            "base case, all triples (2^24 enumerated)",
            lambda be: kernels.base_case_all_triples(residues, 15, backend=be),
        ),
        (
            "witness scan, 2e4 sampled weight functions (m=15)",
            lambda be: kernels.witness_scan("main", residues, 15, 16, v_grid, backend=be),
        ),
        (
            "sequence search, 1e5 refined trials (sym, n=6)",
            lambda be: kernels.sym_batch(seq6, True, backend=be),
        ),
        (
            "sequence search, 2e4 refined trials (asym, n=10)",
            lambda be: kernels.asym_batch(*asym10, True, backend=be),
        ),
        (
            f"direct cyclic triple sum (N={n_big})",
            lambda be: kernels.triple_direct(tri[0], tri[1], tri[2], 7, backend=be),
        ),
    ]

    width = max(len(name) for name, _ in cases)
    print(f"{'kernel':<{width}}  {'compiled':>10}  {'pure':>10}  {'speedup':>8}")
    for name, fn in cases:
        t_c, r_c = timeit(lambda: fn("compiled"), args.repeat)
        t_p, r_p = timeit(lambda: fn("pure"), args.repeat)
        print(f"{name:<{width}}  {t_c:>9.4f}s  {t_p:>9.4f}s  {t_p / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
