#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Times mod-q row reduction on dense random matrices and transfer propagation
on random layered DAGs, validating that both paths agree bit-for-bit.
Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from pbna import kernels

Q = 2147483647


def time_call(fn, *args, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_row_reduce(rng: np.random.Generator, size: int):
    a = rng.integers(0, Q, size=(size, size)).astype(np.int64)

    def run(kernel):
        work = a.copy()
        piv = np.full(size, -1, dtype=np.int64)
        return kernel(work, Q, piv), work

    (r_nb, out_nb) = run(kernels.row_reduce_numba)
    t_nb = time_call(lambda: run(kernels.row_reduce_numba))
    (r_np, out_np) = run(kernels.row_reduce_numpy)
    t_np = time_call(lambda: run(kernels.row_reduce_numpy))
    assert r_nb == r_np and np.array_equal(out_nb, out_np), "kernel paths disagree"
    return t_np, t_nb


def layered_dag(rng: np.random.Generator, layers: int, width: int, n_cols: int, n_slots: int):
    """Random layered wiring: every edge feeds 2 edges of the next layer."""
    edges_per_layer = width
    n_edges = layers * edges_per_layer
    inj_edge = np.arange(edges_per_layer, dtype=np.int64)
    inj_col = np.arange(edges_per_layer, dtype=np.int64) % n_cols
    pair_in, pair_out = [], []
    for layer in range(1, layers):
        base = layer * edges_per_layer
        prev = (layer - 1) * edges_per_layer
        for t in range(edges_per_layer):
            pair_in.extend([prev + t, prev + (t + 1) % edges_per_layer])
            pair_out.extend([base + t, base + t])
    pair_in = np.asarray(pair_in, dtype=np.int64)
    pair_out = np.asarray(pair_out, dtype=np.int64)
    n_coeffs = len(inj_edge) + len(pair_in)
    inj_cidx = np.arange(len(inj_edge), dtype=np.int64)
    pair_cidx = np.arange(len(inj_edge), n_coeffs, dtype=np.int64)
    dest_ptr = np.array([0, edges_per_layer], dtype=np.int64)
    dest_edges = np.arange((layers - 1) * edges_per_layer, n_edges, dtype=np.int64)
    coeffs = rng.integers(0, Q, size=(n_slots, n_coeffs)).astype(np.int64)
    args = (coeffs, inj_edge, inj_col, inj_cidx, pair_in, pair_out, pair_cidx,
            dest_ptr, dest_edges, n_edges, n_cols, Q)
    return args


def bench_propagate(rng: np.random.Generator, layers: int, width: int, n_cols: int, n_slots: int):
    args = layered_dag(rng, layers, width, n_cols, n_slots)
    out_nb = kernels.propagate_numba(*args)
    out_np = kernels.propagate_numpy(*args)
    assert np.array_equal(out_nb, out_np), "kernel paths disagree"
    t_nb = time_call(kernels.propagate_numba, *args)
    t_np = time_call(kernels.propagate_numpy, *args)
    return t_np, t_nb


def main() -> None:
    if not kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not importable; nothing to compare")
    print("warming up JIT compilation...")
    t0 = time.perf_counter()
    kernels.warmup()
    rng = np.random.default_rng(0)
    bench_row_reduce(rng, 8)
    bench_propagate(rng, 3, 4, 2, 2)
    print(f"  warmup: {time.perf_counter() - t0:.1f}s\n")

    print(f"{'kernel':<28} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>8}")
    print("-" * 64)
    for size in (64, 128, 256):
        t_np, t_nb = bench_row_reduce(rng, size)
        print(f"{f'row_reduce {size}x{size}':<28} {t_np * 1e3:>12.2f} {t_nb * 1e3:>12.2f} {t_np / t_nb:>7.1f}x")
    for layers, width, cols, slots in ((20, 50, 16, 8), (40, 100, 32, 8)):
        t_np, t_nb = bench_propagate(rng, layers, width, cols, slots)
        label = f"propagate {layers * width}e/{cols}c/{slots}s"
        print(f"{label:<28} {t_np * 1e3:>12.2f} {t_nb * 1e3:>12.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
