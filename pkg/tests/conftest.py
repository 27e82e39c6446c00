import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st

from slab.construct import build_base, build_gd
from slab.graph import LayeredGraph


@pytest.fixture(scope="session")
def base2():
    return build_base(2)


@pytest.fixture(scope="session")
def base4():
    return build_base(4)


@pytest.fixture(scope="session")
def base8():
    return build_base(8)


@pytest.fixture(scope="session")
def gd22():
    return build_gd(2, 2)


def to_nx(graph, extra=()):
    """networkx copy of ``graph`` plus ``extra`` edges, used as an independent oracle."""
    G = nx.DiGraph()
    G.add_nodes_from(range(graph.n))
    G.add_edges_from(map(tuple, graph.edge_array().tolist()))
    G.add_edges_from((int(u), int(v)) for u, v in extra)
    return G


def random_dag(n, p, seed):
    rng = np.random.default_rng(seed)
    mask = np.triu(rng.random((n, n)) < p, k=1)
    perm = rng.permutation(n)
    u, v = np.nonzero(mask)
    return LayeredGraph.from_edges(n, np.column_stack([perm[u], perm[v]]))


def random_digraph(n, p, seed):
    rng = np.random.default_rng(seed)
    mask = (rng.random((n, n)) < p) & ~np.eye(n, dtype=bool)
    u, v = np.nonzero(mask)
    return LayeredGraph.from_edges(n, np.column_stack([u, v]))


@st.composite
def digraphs(draw, max_n=25, acyclic=False):
    n = draw(st.integers(1, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=4 * n))
    if acyclic:
        edges = [(min(a, b), max(a, b)) for a, b in edges]
    edges = [(a, b) for a, b in edges if a != b]
    return LayeredGraph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))
