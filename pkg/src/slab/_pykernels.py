"""Pure-Python twins of the compiled kernels in ``_ckernels.pyx``.

Used when the extension is not built or ``SLAB_PURE=1`` is set.  Same
signatures, same return types, same tie-breaking.
"""
from collections import deque

import numpy as np


def _adjacency(indptr, indices):
    ip = indptr.tolist()
    ix = indices.tolist()
    return [ix[ip[u]:ip[u + 1]] for u in range(len(ip) - 1)]


def bfs(indptr, indices, source, cutoff=-1):
    n = len(indptr) - 1
    ip = indptr
    dist = [-1] * n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if 0 <= cutoff <= du:
            continue
        for v in indices[ip[u]:ip[u + 1]].tolist():
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    return np.asarray(dist, dtype=np.int32)


def _bfs_order(adj, s, cutoff):
    dist = {s: 0}
    order = [s]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        du = dist[u]
        if 0 <= cutoff <= du:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = du + 1
                order.append(v)
    return order, dist


def distance_histogram(indptr, indices, sources):
    n = len(indptr) - 1
    adj = _adjacency(indptr, indices)
    hist = [0] * (n + 1)
    for s in sources.tolist():
        _, dist = _bfs_order(adj, s, -1)
        for d in dist.values():
            hist[d] += 1
    return np.asarray(hist, dtype=np.int64)


def reachable_pairs(indptr, indices, sources, cutoff, max_pairs):
    adj = _adjacency(indptr, indices)
    src, dst, dd = [], [], []
    for s in sources.tolist():
        order, dist = _bfs_order(adj, s, cutoff)
        if len(src) + len(order) - 1 > max_pairs:
            return None
        for v in order[1:]:
            src.append(s)
            dst.append(v)
            dd.append(dist[v])
    return (np.asarray(src, dtype=np.int32), np.asarray(dst, dtype=np.int32),
            np.asarray(dd, dtype=np.int32))


def topological_order(indptr, indices):
    n = len(indptr) - 1
    adj = _adjacency(indptr, indices)
    indeg = [0] * n
    for targets in adj:
        for v in targets:
            indeg[v] += 1
    order = [u for u in range(n) if indeg[u] == 0]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in adj[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                order.append(v)
    return np.asarray(order, dtype=np.int64)


def longest_weighted_path(indptr, indices, order, weights):
    n = len(indptr) - 1
    adj = _adjacency(indptr, indices)
    w = weights.tolist()
    best = [0] * n
    carry = [0] * n
    pred = [-1] * n
    for u in order.tolist():
        bu = carry[u] + w[u]
        best[u] = bu
        for v in adj[u]:
            if pred[v] < 0 or bu > carry[v]:
                carry[v] = bu
                pred[v] = u
    return np.asarray(best, dtype=np.int64), np.asarray(pred, dtype=np.int32)
