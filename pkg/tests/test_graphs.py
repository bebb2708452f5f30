import math
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from oretile.errors import PreconditionError
from oretile.graphs import (Graph, complement, complete_multipartite, cycle_graph, format_graph, ore_min_sum,
                            ore_report, parse_graph, random_graph)
from oretile.regularity import blowup_instance, density, refute_regularity, super_regular_degree_check

from strategies import graphs


def test_complement_examples():
    assert complement(Graph.complete(3)).m == 0
    assert complement(Graph.empty(4)) == Graph.complete(4)
    c5 = cycle_graph(5)
    assert nx.is_isomorphic(complement(c5).to_networkx(), c5.to_networkx())


@given(graphs())
def test_complement_involution(G):
    assert complement(complement(G)) == G
    assert G.m + complement(G).m == G.n * (G.n - 1) // 2


def test_complete_multipartite():
    assert complete_multipartite([2, 2, 2]).m == 12
    assert complete_multipartite([1, 2, 2]).m == 8
    assert complete_multipartite([5]).m == 0
    with pytest.raises(PreconditionError):
        complete_multipartite([])


def test_random_graph_extremes_and_statistics():
    assert random_graph(10, 0, 1).m == 0
    assert random_graph(10, 1, 1) == Graph.complete(10)
    counts = [random_graph(50, Fraction(1, 2), s).m for s in range(100)]
    sd = math.sqrt(1225 * 0.25)
    assert all(abs(c - 612.5) <= 4 * sd for c in counts)
    assert random_graph(30, Fraction(1, 3), 5) == random_graph(30, Fraction(1, 3), 5)


def test_graph_rejects_loops_and_asymmetry():
    with pytest.raises(PreconditionError):
        Graph(2, [0b01, 0])
    with pytest.raises(PreconditionError):
        Graph(2, [0b10, 0])


def test_text_format_roundtrip():
    G = random_graph(12, Fraction(1, 2), 3)
    assert parse_graph(format_graph(G)) == G
    assert parse_graph("# c\n3 1\n0 2\n").has_edge(0, 2)
    with pytest.raises(PreconditionError):
        parse_graph("3 2\n0 1\n")


def test_ore_report_examples():
    r = ore_report(cycle_graph(5), Graph.complete(3))
    assert (r.min_sum, r.threshold, r.margin) == (4, Fraction(20, 3), Fraction(-8, 3))
    assert ore_report(Graph.complete(6), Graph.complete(3)).min_sum == math.inf
    r = ore_report(complete_multipartite([2, 2, 2]), Graph.complete(3))
    assert (r.min_sum, r.threshold, r.margin) == (8, 8, 0)


@given(graphs(min_n=2, max_n=12))
def test_ore_min_sum_matches_pair_scan(G):
    best, pair = ore_min_sum(G)
    deg = G.degrees()
    scan = [deg[x] + deg[y] for x in range(G.n) for y in range(x + 1, G.n) if not G.has_edge(x, y)]
    if not scan:
        assert best == math.inf and pair is None
    else:
        assert best == min(scan)
        assert not G.has_edge(*pair) and deg[pair[0]] + deg[pair[1]] == best


def test_density_examples():
    K = complete_multipartite([3, 3])
    assert density(K, [0, 1, 2], [3, 4, 5]) == 1
    assert density(Graph.empty(4), [0, 1], [2, 3]) == 0
    C4 = cycle_graph(4)
    assert density(C4, [0, 2], [1, 3]) == 1
    with pytest.raises(PreconditionError):
        density(C4, [0, 1], [1, 2])


def test_blowup_small_cases():
    G, cm = blowup_instance(Graph.complete(2), 3, 1, 0)
    assert G == complete_multipartite([3, 3]) and len(cm.clusters) == 2
    G, cm = blowup_instance(Graph.empty(1), 5, Fraction(1, 2), 0)
    assert G.m == 0 and G.n == 5


def test_blowup_structure():
    R = cycle_graph(5)
    G, cm = blowup_instance(R, 20, Fraction(9, 10), 3)
    of = cm.cluster_of
    for u, v in G.edges():
        assert R.has_edge(of[u], of[v])
    for a, b in R.edges():
        assert cm.densities[a][b] >= Fraction(9, 10)
        assert density(G, cm.clusters[a], cm.clusters[b]) == cm.densities[a][b]


def test_blowup_k3_degrees():
    G, cm = blowup_instance(Graph.complete(3), 100, Fraction(9, 10), 3)
    assert all(cm.densities[a][b] >= Fraction(9, 10) for a in range(3) for b in range(3) if a != b)
    # reduced degrees mirror host degrees: each vertex sees at least most of two clusters
    assert min(G.degrees()) >= 150


def test_refute_regularity():
    K = complete_multipartite([4, 4])
    assert refute_regularity(K, range(4), range(4, 8), Fraction(1, 10)) is None
    G = Graph.from_edges(8, [(a, b) for a in (0, 1) for b in (4, 5)] + [(a, b) for a in (2, 3) for b in (6, 7)])
    w = refute_regularity(G, range(4), range(4, 8), Fraction(1, 4))
    assert w.deviation == Fraction(1, 2)
    assert set(w.X) == {0, 1} and set(w.Y) == {4, 5}


def test_refute_regularity_sampled_dense_pair():
    found = 0
    for seed in range(5):
        G, cm = blowup_instance(Graph.complete(2), 20, Fraction(9, 10), seed)
        found += refute_regularity(G, cm.clusters[0], cm.clusters[1], Fraction(2, 5), 2000, seed) is not None
    assert found <= 1


@given(st.integers(0, 10_000))
def test_refuter_witness_inequalities(seed):
    G = random_graph(12, Fraction(1, 2), seed)
    eps = Fraction(1, 4)
    w = refute_regularity(G, range(6), range(6, 12), eps)
    if w is not None:
        assert len(w.X) > eps * 6 and len(w.Y) > eps * 6
        base = density(G, range(6), range(6, 12))
        assert abs(density(G, w.X, w.Y) - base) == w.deviation >= eps


def test_super_regular_degree_check():
    K = complete_multipartite([3, 3])
    assert super_regular_degree_check(K, [0, 1, 2], [3, 4, 5], Fraction(9, 10)).ok
    G = Graph.from_edges(6, [(a, b) for a in (1, 2) for b in (3, 4, 5)])
    rep = super_regular_degree_check(G, [0, 1, 2], [3, 4, 5], Fraction(1, 10))
    assert rep.violators_A == [0]
    G, cm = blowup_instance(Graph.complete(2), 40, Fraction(19, 20), 1)
    rep = super_regular_degree_check(G, cm.clusters[0], cm.clusters[1], Fraction(1, 2))
    assert rep.ok
