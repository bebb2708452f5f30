from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oretile.catalog import CATALOG, named
from oretile.chromatic import (BottleSpec, bottle_graph, bottle_of, bottle_search, chi_critical, chromatic_number,
                               gamma_param, ore_threshold, smallest_color_class)
from oretile.errors import PreconditionError
from oretile.graphs import Graph, complete_multipartite, cycle_graph
from oretile.tiling import max_tiling

from strategies import graphs


def test_chromatic_number_examples():
    assert chromatic_number(Graph.complete(4)) == 4
    assert chromatic_number(cycle_graph(5)) == 3
    assert chromatic_number(named("petersen")) == 3


def test_smallest_color_class_examples():
    p = smallest_color_class(cycle_graph(5))
    assert (p.chi, p.sigma) == (3, 1)
    assert tuple(p.optimal_class_size_multisets) == ((1, 2, 2),)
    p = smallest_color_class(complete_multipartite([1, 2]))
    assert (p.chi, p.sigma) == (2, 1)
    p = smallest_color_class(complete_multipartite([2, 2, 2]))
    assert (p.chi, p.sigma) == (3, 2)


def test_chi_critical_examples():
    for r in range(2, 6):
        assert chi_critical(Graph.complete(r)) == r
    assert chi_critical(complete_multipartite([1, 2])) == Fraction(3, 2)
    assert chi_critical(cycle_graph(5)) == Fraction(5, 2)
    with pytest.raises(PreconditionError):
        chi_critical(Graph.empty(3))


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_rows(name):
    _, chi, sigma, chi_cr = CATALOG[name]
    H = named(name)
    p = smallest_color_class(H)
    assert (p.chi, p.sigma) == (chi, sigma)
    assert chi_critical(H) == chi_cr == Fraction((chi - 1) * H.n, H.n - sigma)
    assert chi - 1 < chi_cr <= chi
    balanced = all(len(set(t)) == 1 for t in p.optimal_class_size_multisets)
    assert (chi_cr == chi) == balanced


def test_bottle_graph_examples():
    B = bottle_graph(3, 1, 2)
    assert B == complete_multipartite([1, 2, 2]) and chi_critical(B) == Fraction(5, 2)
    assert bottle_graph(2, 1, 1) == Graph.complete(2)
    assert chi_critical(bottle_graph(3, 2, 2)) == 3
    with pytest.raises(PreconditionError):
        bottle_graph(3, 3, 2)


@given(st.integers(2, 4), st.integers(1, 3), st.integers(0, 2))
def test_bottle_chi_cr_law(k, sigma, extra):
    omega = sigma + extra
    spec = BottleSpec(k, sigma, omega)
    assert chi_critical(bottle_graph(k, sigma, omega)) == spec.chi_cr == k - 1 + Fraction(sigma, omega)
    assert sum(spec.color_vector) == 1


def test_bottle_of_examples():
    spec, B = bottle_of(Graph.complete(3))
    assert (spec.k, spec.sigma, spec.omega) == (3, 1, 1)
    spec, B = bottle_of(complete_multipartite([1, 2]))
    assert (spec.k, spec.sigma, spec.omega) == (2, 1, 2)


@pytest.mark.parametrize("name", ["C5", "P4", "K2,3", "bull", "C7", "prism"])
def test_bottle_of_contains_factor(name):
    H = named(name)
    res = bottle_search(H)
    k = res.spec.k
    assert res.graph.n <= (k - 1) * H.n
    assert not max_tiling(res.graph, H).leftover
    assert chi_critical(res.graph) == chi_critical(H)
    h, sigma = H.n, smallest_color_class(H).sigma
    assert res.spec.color_vector[0] == Fraction(sigma, h)


def test_gamma_and_threshold():
    assert gamma_param(3, Fraction(1, 2)) == Fraction(1, 10)
    assert gamma_param(2, 1) == Fraction(1, 2)
    for k in range(2, 6):
        for a in (Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
            assert 1 - 1 / (k - 1 + a) == 1 - Fraction(1, k - 1) + gamma_param(k, a)
    assert ore_threshold(Graph.complete(3), 9) == 12
    assert ore_threshold(complete_multipartite([1, 2]), 30) == 20
    assert ore_threshold(Graph.complete(2), 17) == 17


@given(graphs(min_n=2, max_n=8))
def test_chi_cr_sandwich(H):
    if H.m == 0:
        return
    chi = chromatic_number(H)
    assert chi - 1 < chi_critical(H) <= chi
