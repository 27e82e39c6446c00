import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slab.construct import CriticalPath, critical_walk
from slab.errors import ContractError, InputError, ResourceGuardError, ValidationError
from slab.graph import (UNREACHABLE, LayeredGraph, ShortcutSet, SourceSet, bfs_distances,
                        count_paths, diameter, distance_histogram, scc_condense, scc_labels,
                        transitive_closure_edges)

from conftest import digraphs, random_dag, random_digraph, to_nx


def path_graph(L):
    return LayeredGraph.from_edges(L + 1, [(i, i + 1) for i in range(L)])


def test_from_edges_dedups_and_sorts():
    g = LayeredGraph.from_edges(3, [(2, 0), (0, 2), (0, 1), (0, 2)])
    assert g.m == 3
    assert g.edge_array().tolist() == [[0, 1], [0, 2], [2, 0]]


def test_from_edges_rejects_out_of_range():
    with pytest.raises(InputError):
        LayeredGraph.from_edges(2, [(0, 2)])


def test_arrays_read_only(base2):
    g, _ = base2
    with pytest.raises(ValueError):
        g.indices[0] = 1


def test_layer_codec_roundtrip(base4):
    g, _ = base4
    for v in [0, 1, 255, 256, 777, g.n - 1]:
        layer, coords = g.coords(v)
        assert g.vertex_id(layer, coords) == v
    assert g.vertex_id(1, (0, 0)) == g.layer_size
    with pytest.raises(InputError):
        g.vertex_id(0, (8, 0))
    with pytest.raises(InputError):
        g.coords(g.n)


def test_layered_edges_only_between_consecutive_layers(base4):
    g, _ = base4
    e = g.edge_array()
    assert np.all(g.layer_of(e[:, 1]) == g.layer_of(e[:, 0]) + 1)
    assert g.out_degree().max() == 2


def test_bfs_self_distance_and_unreachable():
    g = LayeredGraph.from_edges(2, [])
    dm = bfs_distances(g, 0)
    assert dm[0] == 0
    assert dm[1] == UNREACHABLE and not dm.reachable(1)
    with pytest.raises(InputError):
        bfs_distances(g, 5)


def test_bfs_critical_endpoint_r4(base4):
    g, _ = base4
    walk = critical_walk(g, CriticalPath((0, 0), (4,)))
    assert bfs_distances(g, walk[0])[walk[-1]] == 4


@settings(max_examples=50, deadline=None)
@given(digraphs(), st.data())
def test_bfs_triangle_inequality(graph, data):
    s = data.draw(st.integers(0, graph.n - 1))
    d = bfs_distances(graph, s).dist
    for u, v in graph.edge_array().tolist():
        if d[u] >= 0:
            assert 0 <= d[v] <= d[u] + 1


def test_count_paths_trivial():
    g = LayeredGraph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert count_paths(g, 0, 0) == 1
    assert count_paths(g, 0, 3) == 2
    assert count_paths(g, 3, 0) == 0


def test_count_paths_cyclic_raises():
    g = LayeredGraph.from_edges(2, [(0, 1), (1, 0)])
    with pytest.raises(ContractError):
        count_paths(g, 0, 1)


def test_count_paths_arbitrary_precision():
    # chain of 80 diamonds: 2^80 paths
    k = 80
    edges = []
    for i in range(k):
        a, b, c, d = 3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3
        edges += [(a, b), (a, c), (b, d), (c, d)]
    g = LayeredGraph.from_edges(3 * k + 1, edges)
    assert count_paths(g, 0, 3 * k) == 2**80


@settings(max_examples=50, deadline=None)
@given(digraphs(max_n=12, acyclic=True), st.data())
def test_count_paths_matches_simple_path_enumeration(graph, data):
    u = data.draw(st.integers(0, graph.n - 1))
    v = data.draw(st.integers(0, graph.n - 1))
    G = to_nx(graph)
    expect = 1 if u == v else sum(1 for _ in nx.all_simple_paths(G, u, v))
    assert count_paths(graph, u, v) == expect
    assert (count_paths(graph, u, v) >= 1) == (u == v or nx.has_path(G, u, v))


def test_diameter_examples():
    assert diameter(path_graph(7)) == 7
    assert diameter(LayeredGraph.from_edges(3, [])) == 0
    g = path_graph(7)
    assert diameter(g, transitive_closure_edges(g)) == 1


def test_diameter_base_r4(base4):
    g, _ = base4
    d = diameter(g)
    assert d >= 4
    # oracle: networkx all-pairs sweep
    G = to_nx(g)
    assert d == max(max(x.values()) for _, x in nx.all_pairs_shortest_path_length(G))


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=15), st.data())
def test_distance_histogram_and_shortcut_monotonicity(graph, data):
    G = to_nx(graph)
    expect = {}
    for s, lengths in nx.all_pairs_shortest_path_length(G):
        for v, d in lengths.items():
            if d:
                expect[d] = expect.get(d, 0) + 1
    assert distance_histogram(graph) == expect
    closure = transitive_closure_edges(graph)
    if len(closure):
        idx = data.draw(st.lists(st.integers(0, len(closure) - 1), max_size=5))
        H = closure[sorted(set(idx))]
        assert diameter(graph, H) <= diameter(graph)


def test_transitive_closure_examples():
    g = path_graph(2)
    assert transitive_closure_edges(g).tolist() == [[0, 1], [0, 2], [1, 2]]
    assert len(transitive_closure_edges(LayeredGraph.from_edges(4, []))) == 0
    with pytest.raises(ResourceGuardError):
        transitive_closure_edges(g, max_pairs=2)


def test_transitive_closure_base_r2(base2):
    g, _ = base2
    closure = transitive_closure_edges(g)
    expect = sum(int((bfs_distances(g, s).dist > 0).sum()) for s in range(g.n))
    assert len(closure) == expect
    tc = nx.transitive_closure_dag(to_nx(g))
    assert set(map(tuple, closure.tolist())) == set(tc.edges())


def test_scc_condense_dag_identity():
    g = random_dag(30, 0.2, 1)
    dag, mapping = scc_condense(g)
    assert dag is g
    assert mapping.tolist() == list(range(30))


def test_scc_condense_cycle():
    k = 6
    g = LayeredGraph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])
    dag, mapping = scc_condense(g)
    assert dag.n == 1 and dag.m == 0
    assert set(mapping.tolist()) == {0}


@pytest.mark.parametrize("seed", range(10))
def test_scc_condense_random(seed):
    g = random_digraph(40, 0.06, seed)
    dag, mapping = scc_condense(g)
    assert dag.is_acyclic()
    comps = list(nx.strongly_connected_components(to_nx(g)))
    assert dag.n == len(comps)
    for comp in comps:
        assert len({int(mapping[v]) for v in comp}) == 1
    # condensed edges match networkx condensation
    C = nx.condensation(to_nx(g), comps)
    relabel = {c: int(mapping[next(iter(C.nodes[c]["members"]))]) for c in C.nodes}
    assert {(relabel[a], relabel[b]) for a, b in C.edges} == set(map(tuple,
                                                                    dag.edge_array().tolist()))
    assert sorted(set(scc_labels(g).tolist())) == list(range(dag.n))


def test_shortcut_set_validation(base2):
    g, _ = base2
    H = ShortcutSet(g, budget=2)
    assert H.add(0, 2 * g.layer_size)
    assert not H.add(0, 2 * g.layer_size)  # duplicate ignored
    with pytest.raises(ValidationError) as exc:
        H.add(g.layer_size, 0)
    assert exc.value.edge == (g.layer_size, 0)
    with pytest.raises(ValidationError):
        H.add(3, 3)
    H.add(0, g.layer_size)
    with pytest.raises(InputError):
        H.add(0, 3 * g.layer_size)
    assert len(H) == 2 and (0, g.layer_size) in H
    assert H.as_array().shape == (2, 2)


def test_source_set():
    S = SourceSet([3, 1, 3])
    assert S.vertices.tolist() == [1, 3] and len(S) == 2
    with pytest.raises(InputError):
        S.check(LayeredGraph.from_edges(3, []))


def test_with_edges_and_reverse():
    g = path_graph(3)
    h = g.with_edges([(0, 3)])
    assert h.m == 4 and not h.is_layered
    ip, ix = g.reverse
    assert ix[ip[2]:ip[3]].tolist() == [1]
    assert g.reaches(0, 3) and not g.reaches(3, 0)
