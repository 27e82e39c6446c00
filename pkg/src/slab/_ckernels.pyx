# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels over CSR adjacency (int64 indptr, int32 indices).

Mirrors :mod:`slab._pykernels` function for function; the two must agree
on every input.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def bfs(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
        Py_ssize_t source, Py_ssize_t cutoff=-1):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, e
    cdef cnp.int32_t u, v, du
    with nogil:
        dist[source] = 0
        queue[tail] = <cnp.int32_t>source
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if cutoff >= 0 and du >= cutoff:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return dist_arr


def distance_histogram(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                       const cnp.int64_t[::1] sources):
    """hist[k] = number of (s, v) with s in sources and dist(s, v) == k."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    hist_arr = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] hist = hist_arr
    cdef cnp.int32_t *dist = <cnp.int32_t *> malloc(n * sizeof(cnp.int32_t))
    cdef cnp.int32_t *queue = <cnp.int32_t *> malloc(n * sizeof(cnp.int32_t))
    cdef cnp.int32_t *stamp = <cnp.int32_t *> malloc(n * sizeof(cnp.int32_t))
    cdef Py_ssize_t i, j, head, tail, e
    cdef cnp.int32_t u, v, du
    if dist == NULL or queue == NULL or stamp == NULL:
        free(dist); free(queue); free(stamp)
        raise MemoryError()
    with nogil:
        for j in range(n):
            stamp[j] = -1
        for i in range(sources.shape[0]):
            head = 0
            tail = 0
            u = <cnp.int32_t>sources[i]
            stamp[u] = <cnp.int32_t>i
            dist[u] = 0
            queue[tail] = u
            tail += 1
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u]
                hist[du] += 1
                for e in range(indptr[u], indptr[u + 1]):
                    v = indices[e]
                    if stamp[v] != i:
                        stamp[v] = <cnp.int32_t>i
                        dist[v] = du + 1
                        queue[tail] = v
                        tail += 1
    free(dist); free(queue); free(stamp)
    return hist_arr


def reachable_pairs(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                    const cnp.int64_t[::1] sources, Py_ssize_t cutoff, Py_ssize_t max_pairs):
    """All (s, v, dist) with v != s reachable from s within cutoff hops.

    Returns None when more than max_pairs pairs exist.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t cap = 1024, count = 0
    src_arr = np.empty(cap, dtype=np.int32)
    dst_arr = np.empty(cap, dtype=np.int32)
    dd_arr = np.empty(cap, dtype=np.int32)
    cdef cnp.int32_t[::1] src = src_arr
    cdef cnp.int32_t[::1] dst = dst_arr
    cdef cnp.int32_t[::1] dd = dd_arr
    stamp_arr = np.full(n, -1, dtype=np.int32)
    dist_arr = np.empty(n, dtype=np.int32)
    queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] stamp = stamp_arr
    cdef cnp.int32_t[::1] dist = dist_arr
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef Py_ssize_t i, head, tail, e
    cdef cnp.int32_t s, u, v, du
    for i in range(sources.shape[0]):
        s = <cnp.int32_t>sources[i]
        head = 0
        tail = 0
        stamp[s] = <cnp.int32_t>i
        dist[s] = 0
        queue[tail] = s
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if cutoff >= 0 and du >= cutoff:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if stamp[v] != i:
                    stamp[v] = <cnp.int32_t>i
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
        # queue[1:tail] holds every vertex reached from s except s itself
        if count + tail - 1 > max_pairs:
            return None
        if count + tail - 1 > cap:
            while count + tail - 1 > cap:
                cap *= 2
            src_arr = np.resize(src_arr, cap)
            dst_arr = np.resize(dst_arr, cap)
            dd_arr = np.resize(dd_arr, cap)
            src = src_arr
            dst = dst_arr
            dd = dd_arr
        for head in range(1, tail):
            v = queue[head]
            src[count] = s
            dst[count] = v
            dd[count] = dist[v]
            count += 1
    return src_arr[:count].copy(), dst_arr[:count].copy(), dd_arr[:count].copy()


def topological_order(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices):
    """Kahn order; shorter than n exactly when the graph has a cycle."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    indeg_arr = np.zeros(n, dtype=np.int64)
    order_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] indeg = indeg_arr
    cdef cnp.int64_t[::1] order = order_arr
    cdef Py_ssize_t e, u, head = 0, tail = 0
    cdef cnp.int32_t v
    with nogil:
        for e in range(indptr[n]):
            indeg[indices[e]] += 1
        for u in range(n):
            if indeg[u] == 0:
                order[tail] = u
                tail += 1
        while head < tail:
            u = order[head]
            head += 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                indeg[v] -= 1
                if indeg[v] == 0:
                    order[tail] = v
                    tail += 1
    return order_arr[:tail].copy()


def longest_weighted_path(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                          const cnp.int64_t[::1] order, const cnp.int32_t[::1] weights):
    """best[v] = max total vertex weight of a path ending at v; pred[v] = argmax predecessor or -1."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    best_arr = np.zeros(n, dtype=np.int64)
    carry_arr = np.zeros(n, dtype=np.int64)
    pred_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int64_t[::1] best = best_arr
    cdef cnp.int64_t[::1] carry = carry_arr
    cdef cnp.int32_t[::1] pred = pred_arr
    cdef Py_ssize_t i, e
    cdef cnp.int64_t u
    cdef cnp.int32_t v
    with nogil:
        for i in range(order.shape[0]):
            u = order[i]
            best[u] = carry[u] + weights[u]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if pred[v] < 0 or best[u] > carry[v]:
                    carry[v] = best[u]
                    pred[v] = <cnp.int32_t>u
    return best_arr, pred_arr
