"""Timing comparison between the two kernel lanes.

Runs each hot kernel through its active (possibly jitted) entry point and
through its uncompiled Python body, and prints one row per kernel.  With
ERGOPULSE_NO_NUMBA=1 (or numba missing) both entries are the same
function, which the report says explicitly.

Usage:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ergopulse._kernels import (
    NUMBA_ENABLED,
    backend,
    chain_product,
    conj_weighted_sum,
    expm_pade13,
    python_lane,
    tv_descent,
)
from ergopulse.matrixcore import random_unitary


def best_of(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases():
    rng = np.random.default_rng(0)
    u6 = random_unitary(6, seed=1)
    x6 = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    w = np.full(5000, 1.0 / 5000)

    u4 = random_unitary(4, seed=2)
    factors = np.stack([random_unitary(4, seed=s) for s in (3, 4, 5)])
    idx = rng.integers(0, 3, size=20_000)

    m8 = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    row = np.ascontiguousarray(rng.dirichlet(np.ones(12)))

    return [
        (
            "conj_weighted_sum (dim 6, 5000 terms)",
            conj_weighted_sum,
            lambda fn: fn(u6, x6, w),
        ),
        (
            "chain_product (dim 4, 20000 steps)",
            chain_product,
            lambda fn: fn(u4, factors, idx),
        ),
        (
            "expm_pade13 (dim 8, 200 calls)",
            expm_pade13,
            lambda fn: [fn(m8) for _ in range(200)],
        ),
        (
            "tv_descent (n 12, 5000 iters)",
            tv_descent,
            lambda fn: fn(row.copy(), 0.25, 5000, 0.0),
        ),
    ]


def main():
    print("active kernel lane: %s" % backend())
    if not NUMBA_ENABLED:
        print(
            "numba lane unavailable (ERGOPULSE_NO_NUMBA set or numba missing); "
            "both columns below time the same pure-numpy code"
        )
    rows = []
    for label, kernel, call in build_cases():
        plain = python_lane(kernel)
        call(kernel)  # warm-up: trigger compilation outside the timing
        t_active = best_of(lambda: call(kernel))
        t_plain = best_of(lambda: call(plain))
        rows.append((label, t_active, t_plain))
    width = max(len(r[0]) for r in rows)
    print(
        "%-*s  %12s  %12s  %8s"
        % (width, "kernel", "active lane", "python lane", "speedup")
    )
    for label, t_active, t_plain in rows:
        speedup = t_plain / t_active if t_active > 0 else float("inf")
        print(
            "%-*s  %10.3f ms  %10.3f ms  %7.1fx"
            % (width, label, t_active * 1e3, t_plain * 1e3, speedup)
        )


if __name__ == "__main__":
    main()
