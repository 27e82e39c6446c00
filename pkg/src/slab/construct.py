"""Deterministic generators for the layered lower-bound instances.

Base family (``d = 1``): ``r + 1`` layers, each the grid ``[2r] x [2r^2]``;
between layers ``i`` and ``i + 1`` every vertex has the zero step and the
step ``(1, q[i])`` where ``q`` is the bit-reversal permutation of ``[r]``.

``G_d`` family: ``d*r + 1`` layers of the grid ``[2dr]^d x [2dr^2]``; the
nonzero step after layer ``i*d + k - 1`` is ``e_k + q[i] * e_y``.

A critical path is a start point in ``[r]^d x [r^2]`` plus thresholds
``s_1..s_d`` in ``[1, r]``; at each layer it takes the nonzero step
``e_k + q e_y`` iff ``q < s_k``.  Steps leaving the grid are omitted from
the graph; critical walks never need them.
"""
from dataclasses import dataclass
from itertools import product
from math import log2

import numpy as np

from ._rng import make_rng
from .errors import InputError, ResourceGuardError
from .graph import LayeredGraph, SourceSet
from . import kernels

#: largest vertex count a generator will materialize
MAX_VERTICES = 50_000_000


def _check_power_of_two(r):
    if not isinstance(r, (int, np.integer)) or r < 1 or (r & (r - 1)):
        raise InputError(f"r={r} is not a power of 2")
    return int(r)


def bit_reversal_permutation(r):
    """``q[i]`` = ``i`` with its ``log2(r)``-bit binary representation reversed."""
    r = _check_power_of_two(r)
    bits = r.bit_length() - 1
    q = np.zeros(r, dtype=np.int64)
    for b in range(bits):
        q |= ((np.arange(r) >> b) & 1) << (bits - 1 - b)
    return q


@dataclass(frozen=True)
class CriticalPath:
    """Start grid point ``(x_1..x_d, y)`` at layer 0 and thresholds ``(s_1..s_d)``."""

    start: tuple
    s: tuple

    @property
    def d(self):
        return len(self.s)

    def endpoint_coords(self):
        """Grid point reached in the last layer."""
        shift = tuple(self.s) + (sum(si * (si - 1) // 2 for si in self.s),)
        return tuple(a + b for a, b in zip(self.start, shift))


def _rows2d(rows):
    arr = np.asarray(rows, dtype=np.int64)
    return arr if arr.ndim == 2 else arr.reshape(len(arr), -1)


class PathSet:
    """Array-backed collection of critical paths.

    ``starts`` is ``(P, d + 1)`` and ``svecs`` is ``(P, d)``.
    """

    def __init__(self, starts, svecs):
        self.starts = _rows2d(starts)
        self.svecs = _rows2d(svecs)
        if len(self.starts) != len(self.svecs) or (
                len(self.starts) and self.starts.shape[1] != self.svecs.shape[1] + 1):
            raise InputError("starts/svecs shape mismatch")

    @classmethod
    def from_paths(cls, paths, d=None):
        paths = list(paths)
        if not paths:
            d = d or 1
            return cls(np.empty((0, d + 1)), np.empty((0, d)))
        return cls([p.start for p in paths], [p.s for p in paths])

    @property
    def d(self):
        return self.svecs.shape[1]

    def __len__(self):
        return len(self.starts)

    def __getitem__(self, i):
        return CriticalPath(tuple(int(x) for x in self.starts[i]),
                            tuple(int(x) for x in self.svecs[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def endpoints_coords(self):
        tail = (self.svecs * (self.svecs - 1) // 2).sum(axis=1, keepdims=True)
        return self.starts + np.hstack([self.svecs, tail])


def _build_layered(dims, schedule):
    """Layered graph with zero step plus ``schedule[i]`` between layers ``i`` and ``i+1``."""
    dims = tuple(int(x) for x in dims)
    schedule = np.asarray(schedule, dtype=np.int64).reshape(-1, len(dims))
    if (schedule < 0).any():
        raise InputError("edge vectors must be non-negative")
    num_layers = len(schedule) + 1
    size = int(np.prod(dims))
    n = num_layers * size
    if n > MAX_VERTICES:
        raise ResourceGuardError(f"instance has {n} vertices, above the {MAX_VERTICES} guard")
    grid = np.indices(dims).reshape(len(dims), -1).T
    strides = np.array([int(np.prod(dims[j + 1:])) for j in range(len(dims))], dtype=np.int64)
    base = np.arange(size, dtype=np.int64)

    valid = np.zeros((num_layers, size), dtype=bool)
    offsets = np.zeros(num_layers, dtype=np.int64)
    for i, w in enumerate(schedule):
        valid[i] = np.all(grid + w < np.asarray(dims), axis=1) & w.any()
        offsets[i] = int(w @ strides)

    deg = np.zeros((num_layers, size), dtype=np.int64)
    deg[:-1] = 1 + valid[:-1]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg.ravel(), out=indptr[1:])
    indices = np.empty(indptr[-1], dtype=np.int32)
    for i in range(num_layers - 1):
        ids = i * size + base
        start = indptr[ids]
        indices[start] = ids + size
        nz = valid[i]
        indices[start[nz] + 1] = ids[nz] + size + offsets[i]
    return LayeredGraph(n, indptr, indices, num_layers=num_layers, dims=dims, schedule=schedule)


def _enumerate_paths(r, d):
    region = (r,) * d + (r * r,)
    starts = np.indices(region).reshape(d + 1, -1).T
    svecs = np.indices((r,) * d).reshape(d, -1).T + 1
    P = len(starts) * len(svecs)
    return PathSet(np.repeat(starts, len(svecs), axis=0), np.tile(svecs, (len(starts), 1))[:P])


def gd_schedule(r, d):
    q = bit_reversal_permutation(r)
    sched = np.zeros((d * r, d + 1), dtype=np.int64)
    for i in range(r):
        for k in range(d):
            sched[i * d + k, k] = 1
            sched[i * d + k, d] = q[i]
    return sched


def build_base(r):
    """Base instance for scale ``r``: ``(graph, paths)`` with ``|P| = r^4``."""
    r = _check_power_of_two(r)
    graph = _build_layered((2 * r, 2 * r * r), gd_schedule(r, 1))
    return graph, _enumerate_paths(r, 1)


def build_gd(r, d):
    """``G_d`` instance: ``d*r + 1`` layers of ``[2dr]^d x [2dr^2]``, ``|P_d| = r^(2d+2)``.

    For ``d = 1`` the edge schedule and paths coincide with :func:`build_base`;
    only the grid extents differ (``2dr``/``2dr^2`` equals ``2r``/``2r^2`` there,
    so the two are in fact identical).
    """
    r = _check_power_of_two(r)
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InputError(f"d={d} must be a positive integer")
    graph = _build_layered((2 * d * r,) * d + (2 * d * r * r,), gd_schedule(r, d))
    return graph, _enumerate_paths(r, int(d))


def instance_params(graph):
    """``(r, d)`` of a generated instance (needs the edge schedule)."""
    if graph.schedule is None:
        raise InputError("graph carries no edge schedule (not a generated instance)")
    d = len(graph.dims) - 1
    return (graph.num_layers - 1) // d, d


def _step_rules(graph):
    """Per layer: dimension index ``k`` of the nonzero step and its threshold value ``q``."""
    sched = graph.schedule
    d = len(graph.dims) - 1
    return np.argmax(sched[:, :d], axis=1), sched[:, d]


def _check_paths(graph, paths):
    r, d = instance_params(graph)
    if paths.d != d:
        raise InputError(f"paths have d={paths.d}, graph has d={d}")
    if len(paths) == 0:
        return
    lo_ok = (paths.starts >= 0).all() and (paths.svecs >= 1).all()
    hi = np.array((r,) * d + (r * r,))
    if not lo_ok or (paths.starts >= hi).any() or (paths.svecs > r).any():
        raise InputError("critical path start or thresholds out of range")


def critical_walks(graph, paths):
    """``(P, num_layers)`` array of vertex ids, one walk per critical path."""
    _check_paths(graph, paths)
    k, q = _step_rules(graph)
    size = graph.layer_size
    strides = np.array([int(np.prod(graph.dims[j + 1:])) for j in range(len(graph.dims))])
    offsets = graph.schedule @ strides
    take = q[None, :] < paths.svecs[:, k]                   # (P, L-1)
    steps = size + take * offsets[None, :]
    start_ids = np.ravel_multi_index(tuple(paths.starts.T), graph.dims).astype(np.int64)
    walks = np.empty((len(paths), graph.num_layers), dtype=np.int64)
    walks[:, 0] = start_ids
    np.cumsum(steps, axis=1, out=walks[:, 1:])
    walks[:, 1:] += start_ids[:, None]
    end = paths.starts + np.hstack([
        np.stack([(take & (k[None, :] == j)).sum(axis=1) for j in range(paths.d)], axis=1),
        (take * q[None, :]).sum(axis=1, keepdims=True)])
    if (end >= np.asarray(graph.dims)).any():
        raise InputError("a critical walk leaves the grid")
    return walks


def critical_walk(graph, path):
    """Vertex sequence (one per layer) of a single critical path."""
    return critical_walks(graph, PathSet.from_paths([path]))[0]


def path_subsample(graph, k):
    """Keep layers ``0, k, 2k, ...`` (and the last layer); join reachable vertices of adjacent kept layers."""
    if not isinstance(k, (int, np.integer)) or k <= 0:
        raise InputError(f"k={k} must be a positive integer")
    if not graph.is_layered:
        raise InputError("path_subsample needs a layered graph")
    last = graph.num_layers - 1
    kept = list(range(0, last + 1, int(k)))
    if kept[-1] != last:
        kept.append(last)
    size = graph.layer_size
    chunks = []
    for j, (a, b) in enumerate(zip(kept, kept[1:])):
        out = kernels.reachable_pairs(graph.indptr, graph.indices, graph.layer_vertices(a), b - a)
        src, dst, _ = out
        mask = dst // size == b
        src = src[mask].astype(np.int64) - a * size + j * size
        dst = dst[mask].astype(np.int64) - b * size + (j + 1) * size
        chunks.append(np.column_stack([src, dst]))
    edges = np.vstack(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    schedule = graph.schedule if k == 1 else None
    return LayeredGraph.from_edges(len(kept) * size, edges, num_layers=len(kept),
                                   dims=graph.dims, schedule=schedule)


def source_probability(graph):
    """``log2(n)^2 / r^(d-1)`` clamped to 1."""
    r, d = instance_params(graph)
    return min(1.0, log2(graph.n) ** 2 / r ** (d - 1))


def sample_source_set(graph, seed, probability=None):
    """Independently keep each layer-0 vertex with ``probability`` (default :func:`source_probability`)."""
    p = source_probability(graph) if probability is None else float(probability)
    layer0 = graph.layer_vertices(0)
    if p >= 1.0:
        return SourceSet(layer0)
    keep = make_rng(seed).random(len(layer0)) < p
    return SourceSet(layer0[keep])


def brute_force_edges(graph_dims, schedule):
    """Edge set by explicit coordinate loops; slow, used as a test oracle."""
    dims = tuple(graph_dims)
    size = int(np.prod(dims))
    edges = set()
    for i, w in enumerate(np.asarray(schedule)):
        for x in product(*(range(e) for e in dims)):
            u = i * size + int(np.ravel_multi_index(x, dims))
            for step in (np.zeros_like(w), w):
                y = tuple(int(a + b) for a, b in zip(x, step))
                if all(0 <= c < e for c, e in zip(y, dims)):
                    edges.add((u, (i + 1) * size + int(np.ravel_multi_index(y, dims))))
    return edges
