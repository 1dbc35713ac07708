#!/usr/bin/env python3
"""Compare the compiled simulation kernel against the pure-numpy fallback.

The delay-difference recurrence is the hot loop of every sweep: it steps
sequentially through time, so it cannot be vectorized away. This script times
both kernels on identical inputs across (nodes, steps, order) grids and prints
the speedup, plus an end-to-end trial timing for context.

Usage: python benchmarks/backend_benchmark.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from pemnet._sdd_py import sdd_recurrence as python_kernel

try:
    from pemnet._sdd_core import sdd_recurrence as compiled_kernel
except ImportError:
    compiled_kernel = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def stable_coefficients(p, n, rng):
    w = rng.standard_normal((p, n, n))
    w *= 0.9 / max(abs(np.linalg.eigvals(w.sum(axis=0)))) / p
    return w


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if compiled_kernel is None:
        print("compiled kernel not built; showing pure-python timings only")

    rng = np.random.default_rng(0)
    grid = [
        (10, 1_000, 1),
        (10, 100_000, 1),
        (10, 10_000, 6),
        (50, 10_000, 1),
        (200, 10_000, 1),
    ]
    print(f"{'nodes':>6} {'steps':>8} {'order':>6} {'python_s':>10} "
          f"{'compiled_s':>11} {'speedup':>8}")
    for n, steps, p in grid:
        w = stable_coefficients(p, n, rng)
        noise = rng.standard_normal((steps, n)) * 0.05
        t_py = best_of(lambda: python_kernel(w, noise), args.repeats)
        if compiled_kernel is None:
            print(f"{n:>6} {steps:>8} {p:>6} {t_py:>10.4f} {'-':>11} {'-':>8}")
            continue
        t_cy = best_of(lambda: compiled_kernel(w, noise), args.repeats)
        check = np.abs(python_kernel(w, noise) - compiled_kernel(w, noise)).max()
        assert check < 1e-9, f"kernels disagree by {check}"
        print(f"{n:>6} {steps:>8} {p:>6} {t_py:>10.4f} {t_cy:>11.4f} "
              f"{t_py / t_cy:>7.1f}x")

    # end-to-end: one benchmark trial at defaults, backend as imported
    from pemnet.bench import run_trial
    from pemnet.dynamics import BACKEND, SDDParams
    from pemnet.graphs import GraphConfig

    t0 = time.perf_counter()
    for trial in range(20):
        run_trial(GraphConfig(), SDDParams(), ["lcrc", "lccf", "lc"], seed=trial)
    per_trial = (time.perf_counter() - t0) / 20
    print(f"\nend-to-end default trial ({BACKEND} backend): {per_trial * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
