"""Exhaustive desk-scale checks of the structural properties of generated instances.

* unique paths: every critical walk is the only path between its endpoints;
* vertex disjointness: walks sharing a threshold vector never meet;
* overlap: a length-``g`` subwalk lies on at most ``8r/g`` critical walks
  (``d = 1``); for ``d >= 2`` the empirical constant is reported.

Each check returns a :class:`VerificationReport` rather than raising.
"""
from dataclasses import dataclass, field

import numpy as np

from .construct import critical_walks, instance_params
from .errors import ResourceGuardError
from .graph import count_paths

#: largest r per dimension accepted by :func:`verify_overlap_bound` by default
OVERLAP_MAX_R = {1: 16, 2: 4}


@dataclass
class VerificationReport:
    lemma: str
    checked: int = 0
    violations: list = field(default_factory=list)
    max_ratio: float = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.violations

    def to_json(self):
        return {"lemma": self.lemma, "checked": self.checked, "violations": self.violations,
                "max_ratio": self.max_ratio, "passed": self.passed, "details": self.details}


def _walks(graph, paths, walks):
    return critical_walks(graph, paths) if walks is None else np.asarray(walks, dtype=np.int64)


def verify_unique_paths(graph, paths, walks=None):
    """Count ``s_π ⇝ t_π`` paths for every critical path; any count != 1 is a violation."""
    walks = _walks(graph, paths, walks)
    report = VerificationReport("unique")
    seen = {}
    for i, (s, t) in enumerate(zip(walks[:, 0].tolist(), walks[:, -1].tolist())):
        if (s, t) not in seen:
            seen[(s, t)] = count_paths(graph, s, t)
        cnt = seen[(s, t)]
        report.checked += 1
        if cnt != 1:
            p = paths[i]
            report.violations.append(
                {"start": list(p.start), "s": list(p.s), "source": s, "target": t, "count": cnt})
    return report


def verify_vertex_disjoint(graph, paths, walks=None):
    """Within each group of equal threshold vectors, the walks are pairwise vertex-disjoint.

    Checked per layer: all group members must occupy distinct vertices there.
    Exact duplicates (same start and thresholds) are collapsed first.
    """
    walks = _walks(graph, paths, walks)
    report = VerificationReport("disjoint")
    if not len(walks):
        return report
    rows = np.hstack([paths.svecs, paths.starts])
    _, keep = np.unique(rows, axis=0, return_index=True)
    keep.sort()
    walks, svecs = walks[keep], paths.svecs[keep]
    _, group = np.unique(svecs, axis=0, return_inverse=True)
    group = group.ravel().astype(np.int64)
    report.checked = len(walks)
    for layer in range(walks.shape[1]):
        keys, counts = np.unique(group * graph.n + walks[:, layer], return_counts=True)
        for key in keys[counts > 1].tolist():
            g, v = divmod(key, graph.n)
            members = np.flatnonzero((group == g) & (walks[:, layer] == v))
            report.violations.append({"s": svecs[members[0]].tolist(), "layer": layer,
                                      "vertex": int(v), "paths": len(members)})
    return report


def subwalk_counts(walks, n):
    """Yield ``(a, g, counts)``: multiplicities of every distinct subwalk from layer ``a`` of length ``g``.

    Subwalks are refined one layer at a time: the group id of window
    ``(a, g + 1)`` is the rank of the pair (group id of ``(a, g)``, next vertex),
    so equal ids mean equal vertex sequences with no hashing involved.
    """
    L = walks.shape[1]
    for a in range(L - 1):
        gid = walks[:, a]
        for g in range(1, L - a):
            _, gid, counts = np.unique(gid * n + walks[:, a + g], return_inverse=True,
                                       return_counts=True)
            gid = gid.ravel().astype(np.int64)
            yield a, g, counts


def verify_overlap_bound(graph, paths, d=None, constant=8, walks=None, max_r=None):
    """Count critical walks through every subwalk ``σ`` of every critical walk.

    ``d = 1``: a violation is any ``σ`` of length ``g`` with ``count * g > constant * r``;
    ``max_ratio`` is ``max count * g / r``.
    ``d >= 2``: only ``max_ratio = max count * (g / r)^d`` is reported; the bound
    there is asymptotic, so no violation is ever recorded.
    """
    r, gd = instance_params(graph)
    d = gd if d is None else d
    limit = OVERLAP_MAX_R.get(d, 2) if max_r is None else max_r
    if r > limit:
        raise ResourceGuardError(f"overlap verification limited to r <= {limit} for d={d}")
    walks = _walks(graph, paths, walks)
    report = VerificationReport("overlap")
    per_length = {}
    best = 0.0
    for a, g, counts in subwalk_counts(walks, graph.n):
        cmax = int(counts.max())
        report.checked += len(counts)
        per_length[g] = max(per_length.get(g, 0), cmax)
        ratio = cmax * g / r if d == 1 else cmax * (g / r) ** d
        best = max(best, ratio)
        if d == 1 and constant is not None and cmax * g > constant * r:
            report.violations.append({"start_layer": a, "length": g, "count": cmax,
                                      "bound": constant * r / g})
    report.max_ratio = best
    report.details = {"r": r, "d": d, "max_count_by_length": per_length}
    return report
