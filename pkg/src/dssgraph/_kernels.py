"""Compiled edge kernels over the CSR arrays of :class:`~dssgraph.graph.Graph`.

All kernels process a contiguous edge-id range ``[lo, hi)`` and write only
to that range of their output, so callers may split the edge set across
threads.  Per-edge summation order is fixed by the adjacency order, which
makes results independent of how the range is split.
"""

import math

import numpy as np
from numba import njit

ZERO_GUARD = 1e-300


@njit(nogil=True, cache=True)
def vertex_sums(indptr, edge_ids, scores, out):
    n = len(indptr) - 1
    for u in range(n):
        acc = 0.0
        for k in range(indptr[u], indptr[u + 1]):
            acc += scores[edge_ids[k]]
        out[u] = acc


@njit(nogil=True, cache=True)
def dss_sweep_range(indptr, indices, edge_ids, src, dst, scores, sums, out, lo, hi):
    for e in range(lo, hi):
        u = src[e]
        v = dst[e]
        su = sums[u]
        sv = sums[v]
        if su < ZERO_GUARD or sv < ZERO_GUARD:
            out[e] = 0.0
            continue
        # x = u and x = v each contribute the edge's own score
        num = 2.0 * scores[e]
        i = indptr[u]
        iend = indptr[u + 1]
        j = indptr[v]
        jend = indptr[v + 1]
        while i < iend and j < jend:
            a = indices[i]
            b = indices[j]
            if a < b:
                i += 1
            elif a > b:
                j += 1
            else:
                num += scores[edge_ids[i]] + scores[edge_ids[j]]
                i += 1
                j += 1
        out[e] = num / math.sqrt(su * sv)


@njit(nogil=True, cache=True)
def common_open_counts(indptr, indices, src, dst, out, lo, hi):
    for e in range(lo, hi):
        u = src[e]
        v = dst[e]
        i = indptr[u]
        iend = indptr[u + 1]
        j = indptr[v]
        jend = indptr[v + 1]
        c = 0
        while i < iend and j < jend:
            a = indices[i]
            b = indices[j]
            if a < b:
                i += 1
            elif a > b:
                j += 1
            else:
                c += 1
                i += 1
                j += 1
        out[e] = c


def warmup() -> None:
    """Compile every kernel on a one-edge graph."""
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([1, 0], dtype=np.int64)
    eids = np.zeros(2, dtype=np.int64)
    src = np.array([0], dtype=np.int64)
    dst = np.array([1], dtype=np.int64)
    scores = np.ones(1)
    sums = np.empty(2)
    vertex_sums(indptr, eids, scores, sums)
    dss_sweep_range(indptr, indices, eids, src, dst, scores, sums, np.empty(1), 0, 1)
    common_open_counts(indptr, indices, src, dst, np.empty(1, dtype=np.int64), 0, 1)
