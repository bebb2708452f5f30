from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oretile.catalog import all_graphs
from oretile.cover import (Connection, CliqueCover, ab_partition, all_maximal_covers, audit_cover,
                           classify_connection, greedy_cover, max_cover_signature, maximal_clique_cover,
                           merge_step, phi_vector)
from oretile.errors import LemmaViolation, PreconditionError
from oretile.graphs import Graph, complete_multipartite, cycle_graph, disjoint_union, random_graph

from strategies import graphs


def test_exact_cover_examples():
    two = disjoint_union(Graph.complete(3), Graph.complete(3))
    assert maximal_clique_cover(two, 4).signature == (0, 2, 0, 0)
    assert maximal_clique_cover(cycle_graph(5), 3).signature == (0, 2, 1)
    c = maximal_clique_cover(Graph.complete(5), 3)
    assert c.signature == (1, 1, 0) and c.certified


def test_cover_text_roundtrip():
    c = maximal_clique_cover(cycle_graph(5), 3)
    assert CliqueCover.parse(c.format(), 3).families == c.families
    assert c.format().splitlines()[0].startswith("2:")


def test_merge_step_examples():
    K4 = Graph.complete(4)
    start = CliqueCover.from_cliques(3, [(0, 1), (2, 3)])
    out = merge_step(K4, start)
    assert out is not None and out.signature == (1, 0, 1)
    assert merge_step(Graph.complete(5), maximal_clique_cover(Graph.complete(5), 3)) is None
    G = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert merge_step(G, CliqueCover.from_cliques(3, [(0, 1), (2, 3)])) is None


@given(graphs(min_n=2, max_n=10), st.integers(2, 4))
def test_merge_monotone_and_heuristic_valid(G, k):
    cover = greedy_cover(G, k)
    while True:
        nxt = merge_step(G, cover)
        if nxt is None:
            break
        assert nxt.signature > cover.signature
        cover = nxt
    assert not cover.violations(G)
    h = maximal_clique_cover(G, k, "heuristic")
    assert not h.certified and not h.violations(G)
    assert h.signature <= maximal_clique_cover(G, k).signature


@given(graphs(min_n=2, max_n=9), st.integers(2, 4))
def test_exact_covers_are_fixed_points(G, k):
    c = maximal_clique_cover(G, k)
    assert merge_step(G, c) is None
    assert c.signature == max_cover_signature(G, k)


def test_classify_connection():
    K = Graph.from_edges(4, [(1, 2), (1, 3), (2, 3), (0, 1)])
    assert classify_connection(K, [0], [1, 2]).kind is Connection.WELL
    K = Graph.complete(3)
    c = classify_connection(K, [0], [1, 2])
    assert c.kind is Connection.OVER and c.edges == 2
    G = Graph.from_edges(3, [(1, 2)])
    assert classify_connection(G, [0], [1, 2]).kind is Connection.UNDER
    with pytest.raises(PreconditionError):
        classify_connection(G, [1, 2], [0])


def test_ab_partition():
    # K1={0}, K2={1} each see 2 of the triangle {2,3,4}, missing the same vertex 2
    G = Graph.from_edges(5, [(2, 3), (2, 4), (3, 4), (0, 3), (0, 4), (1, 3), (1, 4)])
    A, B = ab_partition(G, [0], [1], [2, 3, 4])
    assert A == (2,) and set(B) == {3, 4}
    # i = j: B empty
    H = Graph.from_edges(6, [(0, 1), (2, 3), (4, 5), (0, 4), (1, 5), (2, 4), (3, 5)])
    A, B = ab_partition(H, [0, 1], [2, 3], [4, 5])
    assert set(A) == {4, 5} and B == ()
    # the two small cliques miss different vertices
    bad = Graph.from_edges(5, [(2, 3), (2, 4), (3, 4), (0, 3), (0, 4), (1, 2), (1, 4)])
    with pytest.raises(LemmaViolation):
        ab_partition(bad, [0], [1], [2, 3, 4])
    with pytest.raises(PreconditionError):
        ab_partition(Graph.empty(5), [0], [1], [2, 3, 4])


def test_phi_vector_examples():
    phi = phi_vector(maximal_clique_cover(cycle_graph(5), 3), 5)
    assert (phi[1], phi[2], phi[3]) == (Fraction(1, 5), Fraction(2, 5), 0)
    phi = phi_vector(maximal_clique_cover(Graph.complete(4), 4), 4)
    assert phi[4] == Fraction(1, 4)
    with pytest.raises(PreconditionError):
        phi_vector(maximal_clique_cover(cycle_graph(5), 3), 6)


@pytest.mark.parametrize("n", range(2, 7))
def test_audit_all_small_graphs(n):
    for G in all_graphs(n):
        for k in (3, 4):
            covers, trunc = all_maximal_covers(G, k)
            assert not trunc
            for c in covers:
                rep = audit_cover(G, c)
                assert rep.passed, rep.failures


def test_audit_flags_unmaximal_cover():
    K4 = Graph.complete(4)
    rep = audit_cover(K4, CliqueCover.from_cliques(3, [(0, 1), (2, 3)]))
    assert not rep.certified and rep.checks["matching"] is False


def test_audit_degree_bound_on_ore_instances():
    from oretile.catalog import named
    from oretile.experiments import gen_ore_instance

    H = named("K1,2,2")  # threshold factor 2(1 - 1/2 + 1/10)
    ran = 0
    for seed in range(40):
        G = gen_ore_instance(H, 11, 0, seed)
        c = maximal_clique_cover(G, 3)
        rep = audit_cover(G, c, gamma=Fraction(1, 10))
        assert rep.passed, rep.failures
        if "edge_lower_bound" in rep.checks and any(c.families[i] for i in (1, 2)):
            ran += 1
    assert ran >= 10
