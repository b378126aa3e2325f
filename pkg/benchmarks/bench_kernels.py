#!/usr/bin/env python3
"""Benchmark the pairwise-scan kernel: numba @njit vs the numpy fallback.

The scan dominates validation time on arrays with large coding gain (one
symbol shared by hundreds of cells) or with very many symbols.  Run:

    python3 benchmarks/bench_kernels.py

The fallback path is the same one selected by CODEDSHUFFLE_NO_NUMBA=1.
"""

from __future__ import annotations

import os
import time

from codedshuffle import algorithm1, algorithm2, nnc_pda
from codedshuffle.constructors import GcParameters
from codedshuffle.kernels import first_pair_violation, numba_enabled


def build_cases():
    print("building arrays ...")
    cases = [
        ("alg1(10,2,2)   many small groups", algorithm1(10, 2, 2)),
        ("alg1(14,2,2)   1001 groups of 6", algorithm1(14, 2, 2)),
        ("alg1(16,2,2)   1820 groups of 6", algorithm1(16, 2, 2)),
        ("alg1(12,5,5)   one group of 792", algorithm1(12, 5, 5)),
        ("alg1(12,6,6)   one group of 924", algorithm1(12, 6, 6)),
        ("alg2(6,1,3*5)  mixed degrees", algorithm2(GcParameters(6, 1, (3,) * 5))),
        ("nnc(12,2,4)    cyclic 12x12", nnc_pda(12, 2, 4)),
    ]
    return cases


def time_scan(grid, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        first_pair_violation(grid)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if not numba_enabled():
        print("numba path unavailable; benchmark needs both paths")
        return 1
    cases = build_cases()
    # compile before timing
    first_pair_violation(cases[0][1].grid)

    header = f"{'case':38s} {'cells':>7s} {'njit':>10s} {'numpy':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, arr in cases:
        cells = int((arr.grid != -1).sum())
        t_jit = time_scan(arr.grid)
        os.environ["CODEDSHUFFLE_NO_NUMBA"] = "1"
        try:
            t_np = time_scan(arr.grid)
        finally:
            del os.environ["CODEDSHUFFLE_NO_NUMBA"]
        ratio = t_np / t_jit if t_jit > 0 else float("inf")
        print(
            f"{name:38s} {cells:7d} {t_jit * 1e3:9.3f}ms {t_np * 1e3:9.3f}ms "
            f"{ratio:7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
