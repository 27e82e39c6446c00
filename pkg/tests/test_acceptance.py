"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The summary block is written to the terminal at the end of the module.
"""
import os
import time
from collections import Counter
from contextlib import contextmanager
from math import ceil, log2, sqrt

import numpy as np
import pytest

from slab import io
from slab.construct import build_base, build_gd, critical_walks, sample_source_set
from slab.graph import LayeredGraph, SourceSet, diameter, transitive_closure_edges
from slab.potential import (PotentialConfig, PotentialTracker, adversary_run, drop_of_edge,
                            potential)
from slab.shortcuts import (chain_antichain_decompose, chain_graph, folklore_shortcut,
                            shortcut_path_diam2, shortcut_path_sparse, sourcewise_diameter,
                            sourcewise_shortcut)
from slab.verify import verify_overlap_bound, verify_unique_paths, verify_vertex_disjoint

from conftest import random_dag

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

# regression constants pinned on the first verified run
KAPPA_SPARSE = 0.6
KAPPA_SOURCEWISE = 0.05
BETA_SOURCEWISE = 0.05

RESULTS = {}


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    lines = [RESULTS[k] for k in sorted(RESULTS)]
    if tr is not None:
        tr.write_line("")
        tr.write_sep("-", "acceptance criteria")
        for line in lines:
            tr.write_line(line)
    else:
        print("\n".join(lines))


@contextmanager
def criterion(number, title):
    info = {}
    t0 = time.perf_counter()
    try:
        yield info
    except BaseException:
        RESULTS[number] = (f"FAIL  criterion {number:2d}: {title} "
                           f"[{time.perf_counter() - t0:.1f}s] {info.get('detail', '')}")
        raise
    RESULTS[number] = (f"PASS  criterion {number:2d}: {title} "
                       f"[{time.perf_counter() - t0:.1f}s] {info.get('detail', '')}")
    print(RESULTS[number])


def test_criterion_01_construction_counts():
    with criterion(1, "exact construction counts") as info:
        t0 = time.perf_counter()
        seen = []
        for r in (2, 4, 8, 16):
            g, paths = build_base(r)
            assert g.n == 4 * r**3 * (r + 1)
            assert g.m <= 8 * r**4
            assert len(paths) == r**4
            seen.append(f"r={r}:|V|={g.n},|E|={g.m},|P|={len(paths)}")
        for r in (2, 4):
            _, paths = build_gd(r, 2)
            assert len(paths) == r**6
            seen.append(f"d=2,r={r}:|P_d|={len(paths)}")
        assert time.perf_counter() - t0 < 10
        info["detail"] = "; ".join(seen)


def _instances():
    return [("base r=2", *build_base(2)), ("base r=4", *build_base(4)),
            ("base r=8", *build_base(8)), ("gd d=2 r=2", *build_gd(2, 2))]


def test_criterion_02_unique_paths():
    with criterion(2, "every critical path is the unique path between its endpoints") as info:
        t0 = time.perf_counter()
        checked = []
        for name, g, paths in _instances():
            rep = verify_unique_paths(g, paths)
            assert rep.passed, rep.violations[:3]
            assert rep.checked == len(paths)
            checked.append(f"{name}:{rep.checked}")
        assert time.perf_counter() - t0 < 120
        info["detail"] = ", ".join(checked)


def test_criterion_03_vertex_disjoint():
    with criterion(3, "same-threshold critical paths are vertex-disjoint") as info:
        checked = []
        for name, g, paths in _instances():
            rep = verify_vertex_disjoint(g, paths)
            assert rep.passed, rep.violations[:3]
            checked.append(f"{name}:{rep.checked}")
        info["detail"] = ", ".join(checked)


def test_criterion_04_overlap_bound():
    with criterion(4, "subpath containment count * g <= 8r") as info:
        t0 = time.perf_counter()
        out = []
        for r in (4, 8):
            g, paths = build_base(r)
            rep = verify_overlap_bound(g, paths)
            assert rep.passed, rep.violations[:3]
            # independent tuple-counting oracle over every window of every walk
            walks = critical_walks(g, paths).tolist()
            worst = 0
            for a in range(r):
                for k in range(1, r + 1 - a):
                    top = max(Counter(tuple(w[a:a + k + 1]) for w in walks).values())
                    worst = max(worst, top * k)
            assert worst <= 8 * r
            assert rep.max_ratio == worst / r
            out.append(f"r={r}: max count*g={worst} <= {8 * r}")
        assert time.perf_counter() - t0 < 300
        info["detail"] = "; ".join(out)


def test_criterion_05_potential_baseline():
    with criterion(5, "potential baseline = |P| * r") as info:
        out = []
        for r in (2, 4, 8):
            g, paths = build_base(r)
            full = potential(g, None, None, paths)
            assert full == len(paths) * r
            assert PotentialTracker(g, paths).phi == full
            out.append(f"r={r}: {full}")
        info["detail"] = ", ".join(out)


def test_criterion_06_per_edge_drop_bound():
    with criterion(6, "per-edge drop <= 8l and affected <= 8l/g, every closure edge") as info:
        g, paths = build_base(4)
        closure = transitive_closure_edges(g)
        t = PotentialTracker(g, paths)
        ell, size = g.num_layers, g.layer_size
        max_drop = max_aff = 0
        for u, v in closure.tolist():
            gap = v // size - u // size
            drop, affected = t.drop(u, v)
            assert drop <= 8 * ell
            assert affected <= 8 * ell / gap
            max_drop, max_aff = max(max_drop, drop), max(max_aff, affected * gap)
        # cross-check the incremental route against full recomputation on a sample
        rng = np.random.default_rng(0)
        for e in closure[rng.choice(len(closure), 50, replace=False)]:
            assert t.drop(*e) == drop_of_edge(g, None, paths, None, e, mode="full")
        info["detail"] = (f"{len(closure)} edges, max drop {max_drop} <= {8 * ell}, "
                          f"max affected*g {max_aff} <= {8 * ell}")


def test_criterion_07_augmented_drop():
    with criterion(7, "c=2: drop 0 for g<=c, else <= (ceil(g/c)-1)*affected") as info:
        c = 2
        g, paths = build_base(4)
        closure = transitive_closure_edges(g)
        t = PotentialTracker(g, paths, config=PotentialConfig(c))
        size = g.layer_size
        short = long_ = 0
        for u, v in closure.tolist():
            gap = v // size - u // size
            drop, affected = t.drop(u, v)
            if gap <= c:
                assert drop == 0
                short += 1
            else:
                assert drop <= (ceil(gap / c) - 1) * affected
                long_ += 1
        info["detail"] = f"{short} edges with g<=2, {long_} with g>2"


def test_criterion_08_budget_residual():
    with criterion(8, "greedy adversary at p=|P|/128 keeps final >= initial/2") as info:
        g, paths = build_base(8)
        p = len(paths) // (16 * 8)
        rep = adversary_run(g, paths, p, "greedy-max-drop", seed=0)
        assert rep.budget_used <= p
        assert rep.final >= rep.initial / 2
        assert rep.max_pair_distance >= rep.final / len(paths)
        assert rep.final == potential(g, None, rep.edges, paths)
        again = adversary_run(g, paths, p, "greedy-max-drop", seed=0)
        assert again.edges == rep.edges
        info["detail"] = (f"p={p}, initial={rep.initial}, final={rep.final}, "
                          f"max pair distance={rep.max_pair_distance}")


def test_criterion_09_folklore():
    with criterion(9, "folklore: diameter <= 3D in >= 19/20 seeds") as info:
        t0 = time.perf_counter()
        out = []
        path = LayeredGraph.from_edges(512, [(i, i + 1) for i in range(511)])
        for name, g in (("base r=4", build_base(4)[0]), ("path n=512", path)):
            D = ceil(sqrt(g.n))
            ok = sum(diameter(g, folklore_shortcut(g, D, seed, alpha=3.0)) <= 3 * D
                     for seed in range(1, 21))
            assert ok >= 19
            out.append(f"{name}: {ok}/20 (D={D})")
        assert time.perf_counter() - t0 < 120
        info["detail"] = "; ".join(out)


def test_criterion_10_path_shortcutting():
    with criterion(10, "path shortcutting hop-diameter and size") as info:
        worst_kappa = 0.0
        for k in range(0, 13):
            L = 2**k
            lg = ceil(log2(L))
            dense = shortcut_path_diam2(L)
            assert len(dense) <= L * lg
            assert diameter(chain_graph(L, dense)) <= 2
            sparse = shortcut_path_sparse(L)
            assert len(sparse) <= KAPPA_SPARSE * L
            assert diameter(chain_graph(L, sparse)) <= 2 + 2 * lg
            worst_kappa = max(worst_kappa, len(sparse) / L)
        info["detail"] = f"L=1..4096, sparse edges/L max {worst_kappa:.3f} <= {KAPPA_SPARSE}"


def test_criterion_11_chain_decomposition():
    with criterion(11, "chain/antichain decomposition invariants") as info:
        t0 = time.perf_counter()
        rng = np.random.default_rng(2024)
        count = 0
        for seed in range(50):
            n = int(rng.integers(20, 301))
            g = random_dag(n, float(rng.uniform(0.005, 0.08)), seed)
            l_target = int(rng.integers(1, n + 1))
            dec = chain_antichain_decompose(g, l_target).check(g)
            assert len(dec.antichains) <= 2 * n / l_target
            count += 1
        for r in (2, 4):
            g, _ = build_base(r)
            for l_target in (1, 16, ceil(sqrt(g.n)), g.n // 4):
                dec = chain_antichain_decompose(g, l_target).check(g)
                assert len(dec.antichains) <= 2 * g.n / l_target
                count += 1
        assert time.perf_counter() - t0 < 120
        info["detail"] = f"{count} decompositions verified"


def test_criterion_12_sourcewise():
    with criterion(12, "sourcewise |H| <= k'n log^2 n, diameter <= b' sqrt|S| log^2 n") as info:
        t0 = time.perf_counter()
        worst_size = worst_diam = 0.0
        g4, _ = build_base(4)
        cases = []
        for seed in range(1, 11):
            cases.append((g4, sample_source_set(g4, seed, probability=0.25), seed))
            dag = random_dag(300, 0.02, seed)
            S = SourceSet(np.random.default_rng(seed).choice(300, 30, replace=False))
            cases.append((dag, S, seed))
        for g, S, seed in cases:
            H = sourcewise_shortcut(g, S, seed)
            L2 = log2(g.n) ** 2
            sw = sourcewise_diameter(g, H, S)
            assert len(H) <= KAPPA_SOURCEWISE * g.n * L2
            assert sw <= BETA_SOURCEWISE * sqrt(len(S)) * L2
            assert sw <= sourcewise_diameter(g, None, S)
            worst_size = max(worst_size, len(H) / (g.n * L2))
            worst_diam = max(worst_diam, sw / (sqrt(len(S)) * L2))
        assert time.perf_counter() - t0 < 600
        info["detail"] = (f"{len(cases)} runs, max |H|/(n log^2 n)={worst_size:.4f}, "
                          f"max diam/(sqrt|S| log^2 n)={worst_diam:.4f}")


def test_criterion_13_golden_and_replay():
    with criterion(13, "golden files byte-for-byte, seeded outputs replay") as info:
        for name, (g, paths) in (("base_r4", build_base(4)), ("gd_d2_r2", build_gd(2, 2))):
            with open(os.path.join(GOLDEN, name + ".slab"), encoding="ascii") as fh:
                assert io.format_graph(g) == fh.read()
            with open(os.path.join(GOLDEN, name + ".slab.paths"), encoding="ascii") as fh:
                assert io.format_paths(paths) == fh.read()
        g, paths = build_base(4)

        def seeded():
            S = sample_source_set(g, 5, probability=0.3)
            return (io.format_sources(S),
                    io.format_shortcuts(folklore_shortcut(g, 36, 5)),
                    io.format_shortcuts(sourcewise_shortcut(g, S, 5)),
                    adversary_run(g, paths, 10, "random-closure", 5).edges)

        assert seeded() == seeded()
        info["detail"] = "2 golden instances; sources/folklore/sourcewise/adversary replay"
