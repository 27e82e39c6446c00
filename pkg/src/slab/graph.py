"""Directed-graph substrate: CSR graphs with an optional layered grid codec.

Vertices are dense ids in ``[0, n)``.  A layered graph additionally fixes
``num_layers`` and per-layer grid extents ``dims``; ids are layer-major,
then row-major over the grid coordinates, so ``v = layer * layer_size +
ravel(coords)``.
"""
from dataclasses import dataclass
from functools import cached_property
from math import prod

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import ContractError, InputError, ResourceGuardError, ValidationError

UNREACHABLE = -1

#: default cap on the number of pairs materialised by closure-style queries
DEFAULT_PAIR_GUARD = 20_000_000


class LayeredGraph:
    """Immutable directed graph in CSR form.

    Parameters
    ----------
    n : int
        Number of vertices.
    indptr, indices : array_like
        CSR forward adjacency; targets of ``u`` are ``indices[indptr[u]:indptr[u+1]]``.
    num_layers : int
        Number of layers; 0 marks a general (non-layered) graph.
    dims : tuple of int
        Grid extents of one layer (empty for general graphs).
    schedule : array_like, optional
        ``(num_layers - 1, len(dims))`` array; row ``i`` is the nonzero edge
        vector between layers ``i`` and ``i + 1`` of a generated instance.
    """

    def __init__(self, n, indptr, indices, num_layers=0, dims=(), schedule=None):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        if len(self.indptr) != self.n + 1 or self.indptr[-1] != len(self.indices):
            raise InputError("malformed CSR arrays")
        self.num_layers = int(num_layers)
        self.dims = tuple(int(x) for x in dims)
        if self.num_layers and self.num_layers * self.layer_size != self.n:
            raise InputError(
                f"n={self.n} does not match {self.num_layers} layers of grid {self.dims}")
        self.schedule = None if schedule is None else np.asarray(schedule, dtype=np.int64)
        for arr in (self.indptr, self.indices, self.schedule):
            if arr is not None:
                arr.setflags(write=False)
        self._reach_cache = {}

    @classmethod
    def from_edges(cls, n, edges, **meta):
        """Build from an iterable or ``(m, 2)`` array of ``(u, v)`` pairs; duplicates collapse."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if len(arr) and (arr.min() < 0 or arr.max() >= n):
            raise InputError("edge endpoint out of range")
        if len(arr):
            arr = np.unique(arr, axis=0)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(arr[:, 0], minlength=n), out=indptr[1:])
        return cls(n, indptr, arr[:, 1], **meta)

    # -- basic structure -------------------------------------------------

    @property
    def is_layered(self):
        return self.num_layers > 0

    @property
    def m(self):
        return len(self.indices)

    @property
    def layer_size(self):
        return prod(self.dims) if self.dims else 0

    def __repr__(self):
        kind = f"layers={self.num_layers} dims={self.dims}" if self.is_layered else "general"
        return f"<LayeredGraph n={self.n} m={self.m} {kind}>"

    def check_vertex(self, v):
        if not (0 <= int(v) < self.n):
            raise InputError(f"vertex {v} out of range [0, {self.n})")
        return int(v)

    def successors(self, u):
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def out_degree(self):
        return np.diff(self.indptr)

    def edge_array(self):
        """All edges as an ``(m, 2)`` int64 array in CSR order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degree())
        return np.column_stack([src, self.indices.astype(np.int64)])

    @cached_property
    def reverse(self):
        """Transpose adjacency ``(indptr, indices)``, built on first use."""
        edges = self.edge_array()
        order = np.lexsort((edges[:, 0], edges[:, 1]))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(edges[:, 1], minlength=self.n), out=indptr[1:])
        return indptr, edges[order, 0].astype(np.int32)

    @cached_property
    def topological_order(self):
        order = kernels.topological_order(self.indptr, self.indices)
        if len(order) != self.n:
            raise ContractError("graph has a directed cycle")
        return order

    @cached_property
    def topological_rank(self):
        rank = np.empty(self.n, dtype=np.int64)
        rank[self.topological_order] = np.arange(self.n)
        return rank

    def is_acyclic(self):
        try:
            self.topological_order
        except ContractError:
            return False
        return True

    # -- layered codec ---------------------------------------------------

    def _require_layered(self):
        if not self.is_layered:
            raise InputError("operation needs a layered graph")

    def vertex_id(self, layer, coords):
        self._require_layered()
        coords = tuple(int(c) for c in coords)
        if not (0 <= layer < self.num_layers) or len(coords) != len(self.dims) or any(
                not (0 <= c < e) for c, e in zip(coords, self.dims)):
            raise InputError(f"({layer}, {coords}) outside the grid")
        return int(layer) * self.layer_size + int(np.ravel_multi_index(coords, self.dims))

    def vertex_ids(self, layers, coords):
        """Vectorised :meth:`vertex_id`; ``coords`` has shape ``(k, len(dims))``. No bounds check."""
        coords = np.asarray(coords, dtype=np.int64)
        flat = np.ravel_multi_index(tuple(coords.T), self.dims)
        return np.asarray(layers, dtype=np.int64) * self.layer_size + flat

    def coords(self, v):
        """``(layer, coords)`` of vertex ``v``."""
        self._require_layered()
        v = self.check_vertex(v)
        layer, flat = divmod(v, self.layer_size)
        return layer, tuple(int(c) for c in np.unravel_index(flat, self.dims))

    def layer_of(self, v):
        self._require_layered()
        return np.asarray(v, dtype=np.int64) // self.layer_size

    def layer_vertices(self, layer):
        self._require_layered()
        return np.arange(layer * self.layer_size, (layer + 1) * self.layer_size, dtype=np.int64)

    # -- derived graphs --------------------------------------------------

    def with_edges(self, extra):
        """General graph ``G ∪ extra`` (layer metadata dropped: extra edges may skip layers)."""
        extra = np.asarray(extra, dtype=np.int64).reshape(-1, 2)
        if not len(extra):
            return self
        return LayeredGraph.from_edges(self.n, np.vstack([self.edge_array(), extra]))

    def reach_mask(self, u):
        """Boolean mask of vertices reachable from ``u`` (cached per source)."""
        mask = self._reach_cache.get(u)
        if mask is None:
            if len(self._reach_cache) * self.n > 50_000_000:
                self._reach_cache.clear()
            mask = kernels.bfs(self.indptr, self.indices, u) >= 0
            self._reach_cache[u] = mask
        return mask

    def reaches(self, u, v):
        return bool(self.reach_mask(self.check_vertex(u))[self.check_vertex(v)])


@dataclass(frozen=True)
class DistanceMap:
    """Unweighted distances from one source; ``UNREACHABLE`` (-1) marks unreachable vertices."""

    source: int
    dist: np.ndarray

    def __getitem__(self, v):
        return int(self.dist[v])

    def reachable(self, v):
        return self.dist[v] != UNREACHABLE


class ShortcutSet:
    """Edges from the transitive closure of ``graph``, validated on insert.

    Duplicates are ignored; ``budget`` caps the number of distinct edges.
    """

    def __init__(self, graph, edges=(), budget=None, validate=True):
        self.graph = graph
        self.budget = budget
        self.validate = validate
        self._edges = []
        self._seen = set()
        self.meta = {}
        self.extend(edges)

    def __len__(self):
        return len(self._edges)

    def __iter__(self):
        return iter(self._edges)

    def __contains__(self, edge):
        return tuple(edge) in self._seen

    @property
    def edges(self):
        return list(self._edges)

    def add(self, u, v):
        """Insert ``(u, v)``; returns False if already present."""
        u, v = int(u), int(v)
        if (u, v) in self._seen:
            return False
        if self.validate:
            if u == v or not self.graph.reaches(u, v):
                raise ValidationError(f"edge ({u}, {v}) is not in the transitive closure",
                                      edge=(u, v))
        if self.budget is not None and len(self._edges) >= self.budget:
            raise InputError(f"shortcut budget {self.budget} exhausted")
        self._seen.add((u, v))
        self._edges.append((u, v))
        return True

    def extend(self, edges):
        for u, v in edges:
            self.add(u, v)

    def as_array(self):
        return np.asarray(self._edges, dtype=np.int64).reshape(-1, 2)


def _edge_array(shortcuts):
    if shortcuts is None:
        return np.empty((0, 2), dtype=np.int64)
    if isinstance(shortcuts, ShortcutSet):
        return shortcuts.as_array()
    return np.asarray(shortcuts, dtype=np.int64).reshape(-1, 2)


def bfs_distances(graph, source, cutoff=None):
    """Exact hop distances from ``source``."""
    source = graph.check_vertex(source)
    dist = kernels.bfs(graph.indptr, graph.indices, source, -1 if cutoff is None else cutoff)
    return DistanceMap(source, dist)


def count_paths(graph, u, v):
    """Number of distinct directed paths ``u ⇝ v`` (exact, arbitrary precision).

    Raises :class:`ContractError` on cyclic input.
    """
    u, v = graph.check_vertex(u), graph.check_vertex(v)
    rank = graph.topological_rank  # raises on cycles
    if u == v:
        return 1
    fwd = kernels.bfs(graph.indptr, graph.indices, u)
    if fwd[v] < 0:
        return 0
    rev_ptr, rev_idx = graph.reverse
    back = kernels.bfs(rev_ptr, rev_idx, v)
    between = np.flatnonzero((fwd >= 0) & (back >= 0))
    between = between[np.argsort(rank[between], kind="stable")]
    inside = set(between.tolist())
    counts = dict.fromkeys(inside, 0)
    counts[u] = 1
    ip, ix = graph.indptr, graph.indices
    for x in between.tolist():
        cx = counts[x]
        if not cx:
            continue
        for y in ix[ip[x]:ip[x + 1]].tolist():
            if y in inside:
                counts[y] += cx
    return counts[v]


def distance_histogram(graph, shortcuts=None, sources=None):
    """``{k: #pairs}`` over reachable ``(s, v)``, ``s != v``, in ``G ∪ H``."""
    g = graph.with_edges(_edge_array(shortcuts))
    src = np.arange(g.n) if sources is None else np.asarray(sorted(set(map(int, sources))),
                                                          dtype=np.int64)
    if len(src) and (src.min() < 0 or src.max() >= g.n):
        raise InputError("source vertex out of range")
    hist = kernels.distance_histogram(g.indptr, g.indices, src)
    nz = np.flatnonzero(hist)
    return {int(k): int(hist[k]) for k in nz if k > 0}


def diameter(graph, shortcuts=None):
    """Max ``dist_{G∪H}(u, v)`` over reachable ordered pairs; 0 for edgeless graphs."""
    hist = distance_histogram(graph, shortcuts)
    return max(hist, default=0)


def transitive_closure_edges(graph, max_pairs=DEFAULT_PAIR_GUARD):
    """All ``(u, v)`` with ``u != v`` and ``u ⇝ v``, as an ``(k, 2)`` array sorted by ``(u, v)``."""
    out = kernels.reachable_pairs(graph.indptr, graph.indices, np.arange(graph.n), -1, max_pairs)
    if out is None:
        raise ResourceGuardError(f"transitive closure exceeds {max_pairs} pairs")
    src, dst, _ = out
    pairs = np.column_stack([src, dst]).astype(np.int64)
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def scc_labels(graph):
    """Component label per vertex, numbered by first appearance in id order."""
    mat = csr_matrix((np.ones(graph.m, dtype=np.int8), graph.indices, graph.indptr),
                     shape=(graph.n, graph.n))
    _, raw = connected_components(mat, directed=True, connection="strong")
    _, first = np.unique(raw, return_index=True)
    relabel = np.empty(len(first), dtype=np.int64)
    relabel[np.argsort(first)] = np.arange(len(first))
    return relabel[raw]


def scc_condense(graph):
    """Condense strongly connected components.

    Returns ``(dag, mapping)`` with ``mapping[v]`` the condensed id of ``v``.
    Components are numbered by their lowest vertex id, so a DAG maps to
    itself (and is returned unchanged).
    """
    mapping = scc_labels(graph)
    k = int(mapping.max()) + 1 if graph.n else 0
    if k == graph.n:
        return graph, mapping
    edges = mapping[graph.edge_array()]
    edges = edges[edges[:, 0] != edges[:, 1]]
    return LayeredGraph.from_edges(k, edges), mapping


@dataclass(frozen=True)
class SourceSet:
    """A designated source subset ``S ⊆ V`` (sorted, duplicate-free)."""

    vertices: np.ndarray

    def __post_init__(self):
        arr = np.unique(np.asarray(self.vertices, dtype=np.int64))
        object.__setattr__(self, "vertices", arr)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices.tolist())

    def check(self, graph):
        if len(self) and (self.vertices[0] < 0 or self.vertices[-1] >= graph.n):
            raise InputError("source set contains an invalid vertex id")
        return self
