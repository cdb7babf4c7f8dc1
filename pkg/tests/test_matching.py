import networkx as nx
import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from regsub.graphs import AdjGraph, sample_gnp
from regsub.matching import greedy_matching, is_matching, maximum_matching


def _size(match):
    return sum(1 for v, u in enumerate(match) if u > v)


def _nx_size(g: AdjGraph) -> int:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges().tolist())
    return len(nx.max_weight_matching(G, maxcardinality=True))


@given(st.integers(1, 14), st.floats(0.05, 0.9), st.integers(0, 2**32))
def test_maximum_matching_matches_networkx(n, p, seed):
    g = sample_gnp(n, p, np.random.default_rng(seed))
    match, perfect = maximum_matching(g.adj)
    assert is_matching(g.adj, match)
    assert _size(match) == _nx_size(g)
    assert perfect == (2 * _size(match) == n)


def test_medium_graphs(rng):
    for _ in range(40):
        n = int(rng.integers(30, 120))
        g = sample_gnp(n, float(rng.uniform(1.0, 4.0)) / n, rng)
        match, _ = maximum_matching(g.adj)
        assert is_matching(g.adj, match)
        assert _size(match) == _nx_size(g)


def test_blossom_needed():
    # odd cycle with a pendant path: greedy from vertex 0 gets stuck, augmenting
    # through the 5-cycle blossom fixes it
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (2, 6), (6, 7)]
    g = AdjGraph.from_edges(8, edges)
    match, perfect = maximum_matching(g.adj)
    assert perfect and is_matching(g.adj, match)


def test_warm_start_and_stop():
    g = AdjGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    match, perfect = maximum_matching(g.adj, [-1, 2, 1, -1])
    assert perfect and _size(match) == 2
    star = AdjGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    _, perfect = maximum_matching(star.adj, stop_on_failure=True)
    assert not perfect
    assert is_matching(star.adj, greedy_matching(star.adj))
    assert not is_matching(star.adj, [1, 0, 0, -1])
