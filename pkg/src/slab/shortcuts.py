"""Upper-bound shortcut constructions.

* :func:`folklore_shortcut` -- sample ``~ α n ln n / D`` vertices and add every
  closure pair among them.
* :func:`shortcut_path_diam2` / :func:`shortcut_path_sparse` -- hop-diameter
  reduction along a single chain.
* :func:`chain_antichain_decompose` -- greedy longest-chain peeling plus
  height levels.
* :func:`sourcewise_shortcut` -- star reduction of SCCs, chain decomposition,
  sparse chain shortcuts, sampled chains and source-to-chain edges.
"""
from dataclasses import dataclass
from math import ceil, log, log2, sqrt

import numpy as np

from . import kernels
from ._rng import make_rng
from .errors import InputError
from .graph import LayeredGraph, ShortcutSet, SourceSet, distance_histogram, scc_condense


@dataclass
class StarReduction:
    dag: LayeredGraph
    star_edges: np.ndarray   # (k, 2) original vertex ids
    component: np.ndarray    # vertex -> condensed id
    hubs: np.ndarray         # condensed id -> hub (lowest id) vertex


def scc_star_reduction(graph):
    """Two-way star from the lowest-id vertex of every SCC, plus the condensation."""
    dag, comp = scc_condense(graph)
    k = dag.n
    hubs = np.full(k, graph.n, dtype=np.int64)
    np.minimum.at(hubs, comp, np.arange(graph.n))
    others = np.flatnonzero(hubs[comp] != np.arange(graph.n))
    h = hubs[comp[others]]
    star = np.vstack([np.column_stack([others, h]), np.column_stack([h, others])])
    star = star[np.lexsort((star[:, 1], star[:, 0]))] if len(star) else star.reshape(0, 2)
    return StarReduction(dag, star.astype(np.int64), comp, hubs)


def _diam2_pairs(L, out, lo, hi):
    # iterative midpoint recursion over [lo, hi]
    stack = [(lo, hi)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        m = (lo + hi) // 2
        out.extend((u, m) for u in range(lo, m))
        out.extend((m, v) for v in range(m + 1, hi + 1))
        stack.append((m + 1, hi))
        stack.append((lo, m - 1))


def shortcut_path_diam2(L):
    """Position pairs ``(a, b)``, ``b >= a + 2``, giving a length-``L`` chain hop-diameter <= 2.

    Consecutive positions are assumed joined already.
    """
    if L < 1:
        raise InputError("chain length must be >= 1")
    pairs = []
    _diam2_pairs(L, pairs, 0, L - 1)
    return sorted({(a, b) for a, b in pairs if b - a >= 2})


def shortcut_path_sparse(L):
    """``O(L)`` position pairs giving hop-diameter ``<= 2 + 2 * ceil(log2 L)``.

    The diameter-2 scheme runs on every ``ceil(log2 L)``-th position; hops
    between consecutive sampled positions are added explicitly.
    """
    if L < 1:
        raise InputError("chain length must be >= 1")
    if L <= 2:
        return []
    k = ceil(log2(L))
    sampled = list(range(0, L, k))
    local = []
    _diam2_pairs(len(sampled), local, 0, len(sampled) - 1)
    local.extend((i, i + 1) for i in range(len(sampled) - 1))
    pairs = {(sampled[a], sampled[b]) for a, b in local}
    return sorted((a, b) for a, b in pairs if b - a >= 2)


@dataclass
class ChainDecomposition:
    chains: list
    antichains: list
    l_target: int

    def check(self, dag):
        """Assert every invariant against a reachability oracle; returns self."""
        n = dag.n
        seen = [v for c in self.chains for v in c] + [v for a in self.antichains for v in a]
        if sorted(seen) != list(range(n)):
            raise AssertionError("chains and antichains do not partition V")
        for c in self.chains:
            for a, b in zip(c, c[1:]):
                if not dag.reaches(a, b):
                    raise AssertionError(f"chain order broken at ({a}, {b})")
        for anti in self.antichains:
            members = np.asarray(anti)
            for a in anti:
                hit = dag.reach_mask(a)[members]
                if hit.sum() > 1:
                    raise AssertionError(f"antichain contains comparable vertices from {a}")
        if self.l_target and len(self.antichains) > 2 * n / self.l_target:
            raise AssertionError("too many antichains")
        return self


def chain_antichain_decompose(dag, l_target):
    """Peel ``l_target`` longest chains of the transitive closure, then split the rest by height.

    A chain of the closure among the remaining vertices is a DAG path counted
    by its remaining vertices only, so each peel is one weighted longest-path
    pass.  The remainder has height below ``2n / l_target`` and its height
    levels are antichains.
    """
    if l_target < 1:
        raise InputError("l_target must be >= 1")
    order = dag.topological_order  # raises ContractError on cycles
    weights = np.ones(dag.n, dtype=np.int32)
    chains = []
    best, pred = kernels.longest_weighted_path(dag.indptr, dag.indices, order, weights)
    while len(chains) < l_target and weights.any():
        v = int(np.argmax(best))
        chain = []
        while v >= 0:
            if weights[v]:
                chain.append(v)
            v = int(pred[v])
        chain.reverse()
        chains.append(chain)
        weights[chain] = 0
        best, pred = kernels.longest_weighted_path(dag.indptr, dag.indices, order, weights)
    rest = np.flatnonzero(weights)
    antichains = []
    if len(rest):
        levels = best[rest]
        for h in np.unique(levels).tolist():
            antichains.append(rest[levels == h].tolist())
    return ChainDecomposition(chains, antichains, int(l_target))


def folklore_shortcut(graph, D, seed, alpha=3.0):
    """All closure pairs among ``ceil(α n ln n / D)`` uniformly sampled vertices."""
    if D < 1:
        raise InputError("target diameter D must be >= 1")
    n = graph.n
    k = min(n, ceil(alpha * n * log(n) / D)) if n > 1 else 0
    H = ShortcutSet(graph)
    H.meta.update(algo="folklore", D=int(D), alpha=alpha, sample_size=k)
    if k <= 1:
        return H
    sample = np.sort(make_rng(seed).choice(n, size=k, replace=False))
    src, dst, _ = kernels.reachable_pairs(graph.indptr, graph.indices, sample)
    keep = np.isin(dst, sample)
    H.extend(zip(src[keep].tolist(), dst[keep].tolist()))
    return H


def sourcewise_shortcut(graph, sources, seed, beta=1.0, gamma=1.0):
    """Shortcut set aimed at sourcewise diameter ``Õ(sqrt|S|)`` with ``Õ(n)`` edges.

    Steps: SCC stars; ``D = ceil(β sqrt|S| log2 n)``; ``ceil(16 n' / D)``
    chains over the condensation (``n'`` vertices); chain hops plus sparse
    chain shortcuts; each chain kept with probability ``min(1, γ log2 n / D)``;
    an edge from every source to the first vertex of every kept chain it
    reaches.  Chain vertices are represented by their component hub.
    """
    if not isinstance(sources, SourceSet):
        sources = SourceSet(sources)
    sources.check(graph)
    if len(sources) == 0:
        raise InputError("source set must be non-empty")
    n = graph.n
    red = scc_star_reduction(graph)
    dag, comp, hubs = red.dag, red.component, red.hubs
    logn = log2(n) if n > 1 else 1.0
    D = max(1, ceil(beta * sqrt(len(sources)) * logn))
    l_target = max(1, ceil(16 * dag.n / D))
    decomp = chain_antichain_decompose(dag, l_target)

    H = ShortcutSet(graph)
    H.extend(red.star_edges.tolist())
    n_star = len(H)
    for chain in decomp.chains:
        vs = hubs[np.asarray(chain)]
        for a, b in zip(vs[:-1].tolist(), vs[1:].tolist()):
            if b not in set(graph.successors(a).tolist()):
                H.add(a, b)
        for a, b in shortcut_path_sparse(len(chain)):
            H.add(int(vs[a]), int(vs[b]))
    n_chain = len(H) - n_star

    rng = make_rng(seed)
    p = min(1.0, gamma * logn / D)
    kept = [c for c, keep in zip(decomp.chains, rng.random(len(decomp.chains)) < p) if keep]
    for s in sources:
        reach = dag.reach_mask(int(comp[s]))
        for chain in kept:
            arr = np.asarray(chain)
            hit = np.flatnonzero(reach[arr])
            if not len(hit):
                continue
            u = int(arr[hit[0]])
            if u != comp[s]:
                H.add(s, int(hubs[u]))
    H.meta.update(algo="sourcewise", D=D, l_target=l_target, chains=len(decomp.chains),
                  antichains=len(decomp.antichains), sampled_chains=len(kept),
                  star_edges=n_star, chain_edges=n_chain,
                  source_edges=len(H) - n_star - n_chain, beta=beta, gamma=gamma)
    return H


def sourcewise_diameter(graph, shortcuts, sources):
    """Max ``dist_{G∪H}(s, v)`` over ``s`` in ``S`` and reachable ``v``; 0 for empty ``S``."""
    verts = sources.vertices if isinstance(sources, SourceSet) else list(sources)
    if len(verts) == 0:
        return 0
    return max(distance_histogram(graph, shortcuts, verts), default=0)


def chain_graph(L, pairs):
    """Path ``0 -> 1 -> ... -> L-1`` plus the given position pairs (test/benchmark helper)."""
    edges = [(i, i + 1) for i in range(L - 1)] + list(pairs)
    return LayeredGraph.from_edges(L, edges)

