"""Hot numeric kernels: exact mod-q row reduction and DAG transfer propagation.

Each kernel ships in two interchangeable implementations:

* a loop-oriented version compiled with numba ``@njit`` (the default when
  numba imports cleanly), and
* a pure-numpy version with vectorized row operations, used as fallback.

Set the environment variable ``PBNA_NO_NUMBA=1`` before import to force the
numpy path.  ``benchmarks/bench_kernels.py`` compares both.

All arrays are int64 with entries in [0, q) for a prime q < 2**31, so any
product of two entries fits in int64 and Python modulo semantics keep
intermediate values in range.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    NUMBA_AVAILABLE = False


def numba_disabled_by_env() -> bool:
    return os.environ.get("PBNA_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


NUMBA_ENABLED = NUMBA_AVAILABLE and not numba_disabled_by_env()


def _row_reduce_loops(a, q, pivots):
    """In-place reduced row echelon form of ``a`` modulo q; returns the rank.

    ``pivots[r]`` receives the pivot column of pivot row r (rows beyond the
    rank are left untouched, callers should pre-fill with -1).
    """
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for jj in range(cols):
                tmp = a[r, jj]
                a[r, jj] = a[piv, jj]
                a[piv, jj] = tmp
        # scale pivot row by the inverse of the pivot (Fermat exponentiation)
        inv = 1
        base = a[r, c] % q
        e = q - 2
        while e > 0:
            if e & 1:
                inv = inv * base % q
            base = base * base % q
            e >>= 1
        for jj in range(cols):
            a[r, jj] = a[r, jj] * inv % q
        for i in range(rows):
            if i != r and a[i, c] != 0:
                f = a[i, c]
                for jj in range(cols):
                    a[i, jj] = (a[i, jj] - f * a[r, jj]) % q
        pivots[r] = c
        r += 1
    return r


def row_reduce_numpy(a, q, pivots):
    """Numpy fallback for :func:`_row_reduce_loops` (vectorized row updates)."""
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), q - 2, q)
        a[r] = a[r] * inv % q
        factors = a[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            a[hit] = (a[hit] - factors[hit, None] * a[r][None, :]) % q
        pivots[r] = c
        r += 1
    return r


def _propagate_loops(coeffs, inj_edge, inj_col, inj_cidx, pair_in, pair_out, pair_cidx, dest_ptr, dest_edges, n_edges, n_cols, q):
    """Forward-propagate per-slot coding coefficients through a DAG.

    ``coeffs`` is (n_slots, n_coeffs), one independent assignment per slot.
    Edge values are length-``n_cols`` vectors (one column per injected
    source).  ``pair_*`` arrays must be ordered so every write to an edge
    precedes all reads of it.  Returns (n_dest, n_cols, n_slots).
    """
    n_slots = coeffs.shape[0]
    n_dest = dest_ptr.shape[0] - 1
    out = np.zeros((n_dest, n_cols, n_slots), dtype=np.int64)
    val = np.zeros((n_edges, n_cols), dtype=np.int64)
    for k in range(n_slots):
        val[:, :] = 0
        for p in range(inj_edge.shape[0]):
            e = inj_edge[p]
            j = inj_col[p]
            val[e, j] = (val[e, j] + coeffs[k, inj_cidx[p]]) % q
        for p in range(pair_in.shape[0]):
            c = coeffs[k, pair_cidx[p]]
            src = pair_in[p]
            dst = pair_out[p]
            for j in range(n_cols):
                val[dst, j] = (val[dst, j] + c * val[src, j]) % q
        for i in range(n_dest):
            for t in range(dest_ptr[i], dest_ptr[i + 1]):
                e = dest_edges[t]
                for j in range(n_cols):
                    out[i, j, k] = (out[i, j, k] + val[e, j]) % q
    return out


def propagate_numpy(coeffs, inj_edge, inj_col, inj_cidx, pair_in, pair_out, pair_cidx, dest_ptr, dest_edges, n_edges, n_cols, q):
    """Numpy fallback for :func:`_propagate_loops` (vectorized over columns)."""
    n_slots = coeffs.shape[0]
    n_dest = dest_ptr.shape[0] - 1
    out = np.zeros((n_dest, n_cols, n_slots), dtype=np.int64)
    for k in range(n_slots):
        val = np.zeros((n_edges, n_cols), dtype=np.int64)
        row = coeffs[k]
        for p in range(inj_edge.shape[0]):
            val[inj_edge[p], inj_col[p]] = (val[inj_edge[p], inj_col[p]] + row[inj_cidx[p]]) % q
        for p in range(pair_in.shape[0]):
            val[pair_out[p]] = (val[pair_out[p]] + row[pair_cidx[p]] * val[pair_in[p]]) % q
        for i in range(n_dest):
            sel = dest_edges[dest_ptr[i]:dest_ptr[i + 1]]
            if sel.size:
                out[i, :, k] = val[sel].sum(axis=0) % q
    return out


row_reduce_numba = None
propagate_numba = None
if NUMBA_AVAILABLE:
    row_reduce_numba = njit(cache=True)(_row_reduce_loops)
    propagate_numba = njit(cache=True)(_propagate_loops)

if NUMBA_ENABLED:
    row_reduce = row_reduce_numba
    propagate = propagate_numba
else:
    row_reduce = row_reduce_numpy
    propagate = propagate_numpy


def warmup() -> None:
    """Run the active kernels once on tiny inputs (forces JIT compilation)."""
    a = np.array([[1, 2], [3, 4]], dtype=np.int64)
    piv = np.full(2, -1, dtype=np.int64)
    row_reduce(a, 7, piv)
    coeffs = np.ones((1, 2), dtype=np.int64)
    idx0 = np.zeros(1, dtype=np.int64)
    empty = np.zeros(0, dtype=np.int64)
    propagate(
        coeffs,
        idx0, idx0, idx0,
        empty, empty, empty,
        np.array([0, 1], dtype=np.int64), idx0,
        1, 1, 7,
    )
