#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallback.

Times the three hot kernels (stencil application, mode update, weighted mode
reduction) at a configurable problem size and prints one row per
kernel/backend pair.  The numba rows include a warm-up call so compilation
time is not measured.

    python3 benchmarks/bench_kernels.py --cells 40000 --modes 200 --repeats 20
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mixwave.kernels import implementations


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cells", type=int, default=40000,
                        help="grid cells (stencil size; mode fields use 2x this)")
    parser.add_argument("--modes", type=int, default=200, help="relaxation mode count")
    parser.add_argument("--repeats", type=int, default=20, help="timing repetitions (best-of)")
    args = parser.parse_args()

    nx = int(np.sqrt(args.cells))
    ny = args.cells // nx
    n_cells = nx * ny
    n_dof = 2 * n_cells

    rng = np.random.default_rng(0)
    u = rng.standard_normal(n_cells)
    lap_out = np.empty(n_cells)
    modes = rng.standard_normal((args.modes, n_dof))
    decay = rng.uniform(0.0, 1.0, args.modes)
    gain = rng.uniform(0.0, 0.1, args.modes)
    drive = rng.standard_normal(n_dof)
    weights = rng.standard_normal(args.modes)
    sum_out = np.empty(n_dof)

    workloads = {
        "laplacian": lambda impl: impl["laplacian"](u, nx, ny, 1.0, 1.0, lap_out),
        "mode_update": lambda impl: impl["mode_update"](modes, decay, gain, drive),
        "mode_weighted_sum": lambda impl: impl["mode_weighted_sum"](modes, weights, sum_out),
        "mode_squared_sum": lambda impl: impl["mode_squared_sum"](modes),
    }

    impls = implementations()
    print(f"grid {nx}x{ny} ({n_cells} cells), {args.modes} modes, best of {args.repeats}")
    print(f"{'kernel':<20} {'backend':<8} {'ms/call':>10} {'speedup':>9}")
    for name, call in workloads.items():
        timings = {}
        for backend, impl in impls.items():
            call(impl)  # warm-up (numba compiles here)
            timings[backend] = time_call(lambda: call(impl), args.repeats)
        base = timings.get("numpy")
        for backend, t in timings.items():
            speedup = f"{base / t:8.2f}x" if base else "      n/a"
            print(f"{name:<20} {backend:<8} {t * 1e3:10.3f} {speedup}")


if __name__ == "__main__":
    main()
