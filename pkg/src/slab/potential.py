"""Potential-function auditing of shortcut sets on generated instances.

``Φ(H) = Σ_π dist_{G ∪ E' ∪ H}(s_π, t_π)`` over critical paths ``π``, where
``E'`` optionally holds every pair at distance ``<= c`` and (half-layer
rule) every reachable pair whose head lies in the first ``ℓ/2`` layers.

Two evaluation routes:

* :func:`potential` -- BFS over the explicit union graph; valid for any graph.
* :class:`PotentialTracker` -- per-path dynamic program.  Because each
  critical walk is the unique path between its endpoints, every vertex on a
  shortest ``s_π ⇝ x`` route in ``G ∪ E' ∪ H`` (``x`` on the walk) lies on
  the walk itself, so a path's distance only depends on which position pairs
  ``(i, j)`` of its walk are joined by an extra edge.
"""
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._rng import make_rng
from .construct import critical_walks
from .errors import InputError, ResourceGuardError, ValidationError
from .graph import DEFAULT_PAIR_GUARD, ShortcutSet, SourceSet, _edge_array

STRATEGIES = ("random-closure", "greedy-max-drop", "hitting-set")


@dataclass(frozen=True)
class PotentialConfig:
    """Augmentation radius ``c``, half-layer rule, optional source restriction."""

    c: int = 0
    half_layer: bool = False
    sources: SourceSet = None

    def __post_init__(self):
        if self.c < 0:
            raise InputError("augmentation radius c must be >= 0")


def build_augment(graph, config, max_pairs=DEFAULT_PAIR_GUARD):
    """Explicit ``E'`` as a sorted ``(k, 2)`` array."""
    if config.half_layer and not graph.is_layered:
        raise InputError("half-layer rule needs a layered graph")
    parts = []
    if config.c > 0:
        out = kernels.reachable_pairs(graph.indptr, graph.indices, np.arange(graph.n),
                                      config.c, max_pairs)
        if out is None:
            raise ResourceGuardError(f"E' exceeds {max_pairs} pairs")
        parts.append(np.column_stack(out[:2]))
    if config.half_layer:
        half = [i for i in range(graph.num_layers) if 2 * i < graph.num_layers]
        sources = np.concatenate([graph.layer_vertices(i) for i in half])
        out = kernels.reachable_pairs(graph.indptr, graph.indices, sources, -1, max_pairs)
        if out is None:
            raise ResourceGuardError(f"E' exceeds {max_pairs} pairs")
        src, dst, _ = out
        keep = 2 * (dst.astype(np.int64) // graph.layer_size) < graph.num_layers
        parts.append(np.column_stack([src[keep], dst[keep]]))
    if not parts:
        return np.empty((0, 2), dtype=np.int64)
    edges = np.unique(np.vstack(parts).astype(np.int64), axis=0)
    if len(edges) > max_pairs:
        raise ResourceGuardError(f"E' exceeds {max_pairs} pairs")
    return edges


def _select_paths(paths, walks, sources):
    if sources is None:
        return walks
    return walks[np.isin(walks[:, 0], sources.vertices)]


def path_distances(graph, augment, shortcuts, paths, walks=None, sources=None):
    """``dist_{G ∪ E' ∪ H}(s_π, t_π)`` per path, by BFS over the union graph."""
    walks = critical_walks(graph, paths) if walks is None else np.asarray(walks)
    walks = _select_paths(paths, walks, sources)
    union = graph.with_edges(np.vstack([_edge_array(augment), _edge_array(shortcuts)]))
    out = np.empty(len(walks), dtype=np.int64)
    src = walks[:, 0]
    for s in np.unique(src).tolist():
        rows = np.flatnonzero(src == s)
        out[rows] = kernels.bfs(union.indptr, union.indices, s)[walks[rows, -1]]
    if (out < 0).any():
        raise InputError("a critical path endpoint is unreachable")
    return out


def potential(graph, augment, shortcuts, paths, walks=None, sources=None):
    """``Φ(H)`` by full recomputation (no structural assumption)."""
    return int(path_distances(graph, augment, shortcuts, paths, walks, sources).sum())


class PotentialTracker:
    """Incremental ``Φ`` over the critical walks of a generated instance.

    Parameters
    ----------
    graph, paths :
        A generated instance and (a subset of) its critical paths.
    augment : array_like, optional
        Explicit ``E'`` edges.
    config : PotentialConfig, optional
        Implicit ``E'``: on a walk, positions ``i < j`` are joined when
        ``j - i <= c`` or (half-layer rule) ``2j < ℓ``.  Equivalent to the
        explicit :func:`build_augment` set on generated instances.
    shortcuts : iterable of (u, v), optional
        Initial ``H``.
    """

    def __init__(self, graph, paths, augment=None, config=None, shortcuts=None, walks=None):
        self.graph = graph
        walks = critical_walks(graph, paths) if walks is None else np.asarray(walks)
        sources = config.sources if config is not None else None
        self.walks = _select_paths(paths, walks, sources)
        self.L = self.walks.shape[1]
        L = self.L
        self.pairs = [(i, j) for i in range(L) for j in range(i + 2, L)]
        self._pair_index = {p: k for k, p in enumerate(self.pairs)}
        self.jumps = np.zeros((len(self.walks), len(self.pairs)), dtype=bool)
        pi = np.array([p[0] for p in self.pairs], dtype=np.int64)
        pj = np.array([p[1] for p in self.pairs], dtype=np.int64)
        self._pi, self._pj = pi, pj
        self.keys = self.walks[:, pi] * graph.n + self.walks[:, pj]
        if config is not None:
            implicit = (pj - pi <= config.c) | (config.half_layer & (2 * pj < L))
            self.jumps |= implicit[None, :]
        aug = _edge_array(augment)
        if len(aug):
            self.jumps |= np.isin(self.keys, aug[:, 0] * graph.n + aug[:, 1])
        sc = _edge_array(shortcuts)
        if len(sc):
            self.jumps |= np.isin(self.keys, sc[:, 0] * graph.n + sc[:, 1])
        self._recompute(slice(None))

    def _recompute(self, rows):
        J = self.jumps[rows]
        P, L = J.shape[0], self.L
        pre = np.empty((P, L), dtype=np.int64)
        suf = np.empty((P, L), dtype=np.int64)
        pre[:, 0] = 0
        for j in range(1, L):
            best = pre[:, j - 1] + 1
            for i in range(j - 1):
                col = J[:, self._pair_index[(i, j)]]
                best = np.where(col, np.minimum(best, pre[:, i] + 1), best)
            pre[:, j] = best
        suf[:, L - 1] = 0
        for i in range(L - 2, -1, -1):
            best = suf[:, i + 1] + 1
            for j in range(i + 2, L):
                col = J[:, self._pair_index[(i, j)]]
                best = np.where(col, np.minimum(best, suf[:, j] + 1), best)
            suf[:, i] = best
        if isinstance(rows, slice):
            self.pre, self.suf = pre, suf
        else:
            self.pre[rows], self.suf[rows] = pre, suf

    @property
    def distances(self):
        return self.pre[:, -1]

    @property
    def phi(self):
        return int(self.distances.sum())

    @property
    def max_distance(self):
        return int(self.distances.max()) if len(self.walks) else 0

    def _locate(self, u, v):
        """(pair column, affected rows) of walks that contain ``u`` then ``v`` >= 2 layers later."""
        size = self.graph.layer_size
        i, j = u // size, v // size
        if j - i < 2:
            return None, np.empty(0, dtype=np.int64)
        rows = np.flatnonzero((self.walks[:, i] == u) & (self.walks[:, j] == v))
        return self._pair_index[(i, j)], rows

    def gains(self):
        """``(P, npairs)`` distance decrease if each walk-position pair got its own edge."""
        via = self.pre[:, self._pi] + 1 + self.suf[:, self._pj]
        return np.maximum(0, self.distances[:, None] - via)

    def drop(self, u, v):
        """``(Φ(H) - Φ(H ∪ {(u, v)}), #paths whose distance changes)`` without committing."""
        col, rows = self._locate(int(u), int(v))
        if col is None or not len(rows):
            return 0, 0
        i, j = self.pairs[col]
        g = np.maximum(0, self.distances[rows] - (self.pre[rows, i] + 1 + self.suf[rows, j]))
        return int(g.sum()), int((g > 0).sum())

    def add(self, u, v):
        """Commit ``(u, v)`` to ``H``; returns ``(drop, affected)``."""
        result = self.drop(u, v)
        col, rows = self._locate(int(u), int(v))
        if col is not None and len(rows):
            self.jumps[rows, col] = True
            self._recompute(rows)
        return result


def drop_of_edge(graph, augment, paths, shortcuts, new_edge, config=None, mode="incremental"):
    """Exact ``Φ(H) - Φ(H ∪ {e})`` and the number of paths whose distance changes.

    ``mode="full"`` recomputes both potentials by BFS (cross-check route).
    """
    u, v = (int(x) for x in new_edge)
    if u == v or not graph.reaches(u, v):
        raise ValidationError(f"edge ({u}, {v}) is not in the transitive closure", edge=(u, v))
    if mode == "incremental":
        return PotentialTracker(graph, paths, augment=augment, config=config,
                                shortcuts=shortcuts).drop(u, v)
    if mode != "full":
        raise InputError(f"unknown mode {mode!r}")
    sources = config.sources if config is not None else None
    h = _edge_array(shortcuts)
    before = path_distances(graph, augment, h, paths, sources=sources)
    after = path_distances(graph, augment, np.vstack([h, [[u, v]]]), paths, sources=sources)
    return int((before - after).sum()), int((before != after).sum())


@dataclass
class PotentialReport:
    initial: int
    final: int
    budget: int
    strategy: str
    seed: int
    drops: list = field(default_factory=list)
    affected: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    max_pair_distance: int = 0
    num_paths: int = 0
    config: dict = field(default_factory=dict)

    @property
    def budget_used(self):
        return len(self.edges)

    @property
    def drop_histogram(self):
        return dict(sorted(Counter(self.drops).items()))

    def to_json(self):
        return {
            "initial": self.initial, "final": self.final, "budget": self.budget,
            "budget_used": self.budget_used, "max_pair_distance": self.max_pair_distance,
            "num_paths": self.num_paths,
            "drop_histogram": {str(k): v for k, v in self.drop_histogram.items()},
            "drops": self.drops, "strategy": self.strategy, "seed": self.seed,
            "config": self.config,
        }


def _pick(tracker, inv, nkeys, by_count):
    gains = tracker.gains().ravel()
    drop = np.bincount(inv, weights=gains, minlength=nkeys)
    if by_count:
        hits = np.bincount(inv, weights=gains > 0, minlength=nkeys)
        order = np.lexsort((-drop, -hits))  # most paths hit, then largest drop, then smallest key
        best = order[0]
        return best, hits[best] > 0
    best = int(np.argmax(drop))
    return best, drop[best] > 0


def adversary_run(graph, paths, budget, strategy, seed, config=None, augment=None,
                  max_attempts=None):
    """Insert up to ``budget`` shortcuts chosen by ``strategy``; audit every drop.

    ``greedy-max-drop`` takes the candidate with the largest immediate drop;
    ``hitting-set`` the one shortening the most critical paths.  Both only
    consider pairs of vertices on a common critical walk (every other closure
    edge has zero drop) and stop early once no candidate helps.
    ``random-closure`` draws ``u`` uniformly among vertices with an out-edge,
    then ``v`` uniformly among the vertices reachable from ``u``.
    """
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if budget < 0:
        raise InputError("budget must be >= 0")
    config = config or PotentialConfig()
    tracker = PotentialTracker(graph, paths, augment=augment,
                               config=config if augment is None else PotentialConfig(
                                   0, False, config.sources))
    report = PotentialReport(
        initial=tracker.phi, final=tracker.phi, budget=int(budget), strategy=strategy,
        seed=int(seed), num_paths=len(tracker.walks),
        config={"c": config.c, "half_layer": config.half_layer,
                "sources": None if config.sources is None else len(config.sources)})
    H = ShortcutSet(graph, budget=budget)
    if strategy == "random-closure":
        rng = make_rng(seed)
        candidates = np.flatnonzero(graph.out_degree() > 0)
        attempts = 0
        limit = max_attempts or 20 * budget + 100
        while len(H) < budget and len(candidates) and attempts < limit:
            attempts += 1
            u = int(candidates[rng.integers(len(candidates))])
            reach = np.flatnonzero(graph.reach_mask(u))
            reach = reach[reach != u]
            v = int(reach[rng.integers(len(reach))])
            if (u, v) in H:
                continue
            H.add(u, v)
            d, a = tracker.add(u, v)
            report.drops.append(d)
            report.affected.append(a)
    else:
        ukeys, inv = np.unique(tracker.keys.ravel(), return_inverse=True)
        inv = inv.ravel()
        while len(H) < budget:
            best, useful = _pick(tracker, inv, len(ukeys), strategy == "hitting-set")
            if not useful:
                break
            u, v = divmod(int(ukeys[best]), graph.n)
            H.add(u, v)
            d, a = tracker.add(u, v)
            report.drops.append(d)
            report.affected.append(a)
    report.edges = H.edges
    report.final = tracker.phi
    report.max_pair_distance = tracker.max_distance
    return report
