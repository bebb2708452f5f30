from fractions import Fraction as F
from itertools import permutations

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from oretile import PreconditionError
from oretile.graphs import Digraph, Graph, random_graph
from oretile.tiling import kk_tiling_padded
from oretile.transfer import (
    build_digraph, covers_by_sources, low_degree_clusters, out_degree_check, plan_transfers, sink_set_greedy,
    source_set, source_sets,
)

from strategies import digraphs, graphs


def _nx(D: Digraph) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(D.n))
    g.add_edges_from(D.arcs())
    return g


def _recount(R: Graph, factor) -> set:
    # the definition read literally, loops dropped
    arcs = set()
    for t in factor:
        for U in range(R.n):
            for W in t:
                if U != W and all(R.has_edge(U, x) for x in t if x != W):
                    arcs.add((U, W))
    return arcs


# ---------------------------------------------------------- digraph


def test_complete_one_tuple():
    T = build_digraph(Graph.complete(5), [(0, 1, 2)])
    # a member would need a loop to its own cluster, so only outsiders get arcs
    assert [T.D.out_degree(u) for u in range(5)] == [0, 0, 0, 3, 3]
    assert T.D.out[3] == 0b111


def test_missing_adjacency_forces_the_arc():
    R = Graph.complete(4).without_edges([(3, 1)])
    T = build_digraph(R, [(0, 1, 2)])
    assert T.D.out[3] == 1 << 1
    assert T.verify(R)


def test_overlapping_tuples_rejected():
    with pytest.raises(PreconditionError):
        build_digraph(Graph.complete(4), [(0, 1), (1, 2)])


@given(graphs(4, 12), st.sampled_from([2, 3]))
def test_arcs_match_recount(R, k):
    try:
        tiling = kk_tiling_padded(R, k, R.n, 10_000)
    except PreconditionError:
        tiling = None
    factor = list(tiling.copies) if tiling else []
    T = build_digraph(R, factor)
    assert set(T.D.arcs()) == _recount(R, factor)
    assert T.verify(R)


# ------------------------------------------------------------ sources


def test_source_set_examples():
    D = Digraph.from_arcs(4, [(0, 1), (1, 2)])
    assert source_set(D, 3) == {3}
    assert source_set(D, 2) == {0, 1, 2}
    with pytest.raises(PreconditionError):
        source_set(D, 4)


@given(digraphs(1, 14))
def test_source_sets_agree_with_networkx(D):
    g = _nx(D)
    masks = source_sets(D)
    for v in range(D.n):
        want = nx.ancestors(g, v) | {v}
        assert source_set(D, v) == want
        assert {u for u in range(D.n) if (masks[v] >> u) & 1} == want


@given(digraphs(1, 12))
def test_source_set_monotone_along_arcs(D):
    for v, u in D.arcs():
        assert len(source_set(D, u)) >= len(source_set(D, v))


# ------------------------------------------------------------- sinks


def test_complete_digraph_has_one_sink():
    n = 6
    D = Digraph.from_arcs(n, permutations(range(n), 2))
    assert len(sink_set_greedy(D).sinks) == 1


def test_two_triangles():
    D = Digraph.from_arcs(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    res = sink_set_greedy(D)
    assert len(res.sinks) == 2 and res.sinks == [0, 3]
    assert covers_by_sources(D, res.sinks)


@given(st.integers(1, 12), st.randoms(use_true_random=False))
def test_tournaments(n, rnd):
    arcs = [(u, v) if rnd.random() < 0.5 else (v, u) for u in range(n) for v in range(u + 1, n)]
    D = Digraph.from_arcs(n, arcs)
    res = sink_set_greedy(D)
    assert covers_by_sources(D, res.sinks)
    assert len(res.sinks) <= n // (res.delta + 1)


@given(digraphs(1, 14))
def test_greedy_rounds_and_bound(D):
    res = sink_set_greedy(D)
    assert covers_by_sources(D, res.sinks)
    assert all(r["removed"] >= res.delta + 1 for r in res.rounds)
    assert len(res.sinks) <= D.n // (res.delta + 1)


# ------------------------------------------------------- out degree


def test_balanced_complete_out_degree():
    R = Graph.complete(9)
    T = build_digraph(R, [(0, 1, 2), (3, 4, 5), (6, 7, 8)])
    for U in range(9):
        c = out_degree_check(T, R, U, k=3, case="balanced")
        assert c.hypothesis and c.passed and c.measured == 7    # 6 arcs plus the own element
        assert c.bound == F(9, 6)


def test_general_complete_out_degree():
    R = Graph.complete(6)
    T = build_digraph(R, [(0, 1, 2), (3, 4, 5)])
    c = out_degree_check(T, R, 0, k=3, gamma=F(1, 10), alpha_p=F(181, 360), case="general")
    assert c.hypothesis and c.passed and c.measured == 4


def test_low_degree_cluster_is_gated():
    R = Graph.complete(6).without_edges([(0, x) for x in range(1, 6)])
    T = build_digraph(R, [(1, 2, 3)])
    c = out_degree_check(T, R, 0, k=3, case="balanced")
    assert not c.hypothesis and c.passed is None
    assert low_degree_clusters(R, 2) == [0]
    with pytest.raises(PreconditionError):
        out_degree_check(T, R, 0, k=3, case="other")


@given(st.integers(0, 10_000))
def test_balanced_proposition_on_random_reduced_graphs(seed):
    R = random_graph(12, F(9, 10), seed)
    tiling = kk_tiling_padded(R, 3, 12, 20_000) if R.m > 40 else None
    if tiling is None:
        return
    T = build_digraph(R, tiling.copies)
    for U in range(R.n):
        c = out_degree_check(T, R, U, k=3, case="balanced")
        assert c.passed in (None, True)


# ---------------------------------------------------------- planning


def test_plan_examples():
    D = Digraph.from_arcs(3, [(0, 1), (1, 2)])
    assert plan_transfers(D, {2: 4}, [2]).moves == []
    plan = plan_transfers(D, {0: 3}, [2])
    assert plan.moves == [((0, 1, 2), 3)] and plan.residual == {2: 3} and plan.unrouted == {}


def test_unreachable_is_reported():
    D = Digraph.from_arcs(3, [(0, 1)])
    plan = plan_transfers(D, {2: 5, 0: 1}, [1])
    assert plan.unrouted == {2: 5} and plan.residual == {1: 1}


def test_cap_splits_paths():
    D = Digraph.from_arcs(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    plan = plan_transfers(D, {0: 5}, [3], cap=3)
    assert plan.total_moved() == 5 and len(plan.moves) == 2
    assert plan.residual == {3: 5}


@given(digraphs(2, 12), st.lists(st.integers(0, 6), min_size=12, max_size=12), st.integers(1, 4))
def test_plan_conserves_mass(D, amounts, cap):
    extras = {v: amounts[v] for v in range(D.n)}
    sinks = sink_set_greedy(D).sinks
    for c in (None, cap):
        plan = plan_transfers(D, extras, sinks, cap=c)
        assert sum(plan.residual.values()) + sum(plan.unrouted.values()) == sum(extras.values())
        for path, amount in plan.moves:
            assert path[-1] in sinks and amount > 0
            assert all((D.out[a] >> b) & 1 for a, b in zip(path, path[1:]))
