#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot paths on both lanes:

* exact enumeration: all players' moments of a dense 2**n worth table;
* permutation sampling: marginals of one player over sampled orderings.

Run: ``python benchmarks/bench_kernels.py [--quick]``
"""

import argparse
import time

import numpy as np

from coalition_var import _kernels_py
from coalition_var.weights import shapley_size_weights

try:
    from coalition_var import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _swaps(rng, m, n):
    swaps = np.empty((m, n - 1), dtype=np.int64)
    for t in range(n - 1):
        swaps[:, t] = rng.integers(0, n - t, size=m, dtype=np.int64)
    return swaps


def bench_exact(lane, n):
    rng = np.random.default_rng(0)
    values = rng.uniform(-1, 1, 1 << n)
    values[0] = 0.0
    wsize = shapley_size_weights(n)
    lane.tabular_moments(values, n, wsize)  # warm caches
    return _time(lambda: lane.tabular_moments(values, n, wsize))


def bench_sampling_tabular(lane, n, m):
    rng = np.random.default_rng(1)
    values = rng.uniform(-1, 1, 1 << n)
    swaps = _swaps(rng, m, n)
    lane.sample_marginals_tabular(values, n, 0, swaps[:64])
    return _time(lambda: lane.sample_marginals_tabular(values, n, 0, swaps))


def bench_sampling_symmetric(lane, n, m):
    rng = np.random.default_rng(2)
    delta = np.zeros(n)
    delta[n // 2] = float(n)
    swaps = _swaps(rng, m, n)
    lane.sample_marginals_symmetric(delta, n, 0, swaps[:64])
    return _time(lambda: lane.sample_marginals_symmetric(delta, n, 0, swaps))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    n_exact = 16 if args.quick else 20
    n_sample, m_sample = (41, 50_000) if args.quick else (101, 200_000)
    n_tab, m_tab = (12, 50_000) if args.quick else (16, 200_000)

    cases = [
        (f"exact moments, n={n_exact} (2**{n_exact} coalitions)",
         lambda lane: bench_exact(lane, n_exact)),
        (f"sampled marginals, tabular n={n_tab}, {m_tab} orderings",
         lambda lane: bench_sampling_tabular(lane, n_tab, m_tab)),
        (f"sampled marginals, majority n={n_sample}, {m_sample} orderings",
         lambda lane: bench_sampling_symmetric(lane, n_sample, m_sample)),
    ]

    print(f"{'case':<55} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, bench in cases:
        py = bench(_kernels_py)
        if _kernels is None:
            print(f"{label:<55} {py * 1e3:>9.1f}ms {'n/a':>10} {'n/a':>8}")
            continue
        cy = bench(_kernels)
        print(
            f"{label:<55} {py * 1e3:>9.1f}ms {cy * 1e3:>9.1f}ms {py / cy:>7.1f}x"
        )
    if _kernels is None:
        print("\ncompiled extension not built; only the fallback lane was timed")


if __name__ == "__main__":
    main()
