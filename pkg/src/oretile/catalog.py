"""Named pattern graphs with hand-checked invariants, and small-graph enumeration."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import pynauty

from .graphs import Graph, complete_multipartite, cycle_graph, disjoint_union, path_graph, star_graph


def _wheel(rim: int) -> Graph:
    c = cycle_graph(rim)
    return c.add_universal(1)


def _petersen() -> Graph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, edges)


def _prism() -> Graph:
    return Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


def _cube() -> Graph:
    return Graph.from_edges(8, [(a, a ^ (1 << b)) for a in range(8) for b in range(3) if a < a ^ (1 << b)])


def _bull() -> Graph:
    return Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)])


def _diamond() -> Graph:
    return complete_multipartite([1, 1, 2])


# name -> (graph factory, chi, sigma, chi_cr); every row was worked out by hand
CATALOG: dict[str, tuple] = {
    "K2": (lambda: Graph.complete(2), 2, 1, Fraction(2)),
    "K3": (lambda: Graph.complete(3), 3, 1, Fraction(3)),
    "K4": (lambda: Graph.complete(4), 4, 1, Fraction(4)),
    "K5": (lambda: Graph.complete(5), 5, 1, Fraction(5)),
    "P3": (lambda: path_graph(3), 2, 1, Fraction(3, 2)),
    "K1,3": (lambda: star_graph(3), 2, 1, Fraction(4, 3)),
    "K1,4": (lambda: star_graph(4), 2, 1, Fraction(5, 4)),
    "P4": (lambda: path_graph(4), 2, 2, Fraction(2)),
    "P5": (lambda: path_graph(5), 2, 2, Fraction(5, 3)),
    "C4": (lambda: cycle_graph(4), 2, 2, Fraction(2)),
    "C5": (lambda: cycle_graph(5), 3, 1, Fraction(5, 2)),
    "C6": (lambda: cycle_graph(6), 2, 3, Fraction(2)),
    "C7": (lambda: cycle_graph(7), 3, 1, Fraction(7, 3)),
    "C9": (lambda: cycle_graph(9), 3, 1, Fraction(9, 4)),
    "K2,3": (lambda: complete_multipartite([2, 3]), 2, 2, Fraction(5, 3)),
    "K3,3": (lambda: complete_multipartite([3, 3]), 2, 3, Fraction(2)),
    "K1,2,2": (lambda: complete_multipartite([1, 2, 2]), 3, 1, Fraction(5, 2)),
    "K2,2,2": (lambda: complete_multipartite([2, 2, 2]), 3, 2, Fraction(3)),
    "K2,2,3": (lambda: complete_multipartite([2, 2, 3]), 3, 2, Fraction(14, 5)),
    "diamond": (_diamond, 3, 1, Fraction(8, 3)),
    "W4": (lambda: _wheel(4), 3, 1, Fraction(5, 2)),
    "W5": (lambda: _wheel(5), 4, 1, Fraction(18, 5)),
    "petersen": (_petersen, 3, 3, Fraction(20, 7)),
    "prism": (_prism, 3, 2, Fraction(3)),
    "cube": (_cube, 2, 4, Fraction(2)),
    "bull": (_bull, 3, 1, Fraction(5, 2)),
    "2K2": (lambda: disjoint_union(Graph.complete(2), Graph.complete(2)), 2, 2, Fraction(2)),
    "K3+K1": (lambda: disjoint_union(Graph.complete(3), Graph.empty(1)), 3, 1, Fraction(8, 3)),
}


def named(name: str) -> Graph:
    return CATALOG[name][0]()


# pattern names accepted on the command line, beyond the catalog
def pattern_from_name(name: str) -> Graph:
    if name in CATALOG:
        return named(name)
    if name.startswith("K") and "," in name:
        return complete_multipartite([int(x) for x in name[1:].split(",")])
    if name.startswith("K") and name[1:].isdigit():
        return Graph.complete(int(name[1:]))
    if name.startswith("C") and name[1:].isdigit():
        return cycle_graph(int(name[1:]))
    if name.startswith("P") and name[1:].isdigit():
        return path_graph(int(name[1:]))
    raise KeyError(name)


def _certificate(n: int, rows) -> bytes:
    adj = {v: [u for u in range(n) if (rows[v] >> u) & 1] for v in range(n)}
    return pynauty.certificate(pynauty.Graph(n, adjacency_dict=adj))


@lru_cache(maxsize=None)
def _nonisomorphic(n: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    if n == 1:
        return ((0,),)
    out = {}
    for rows in _nonisomorphic(n - 1):
        for nb in range(1 << (n - 1)):
            new = [r | (((nb >> v) & 1) << (n - 1)) for v, r in enumerate(rows)] + [nb]
            cert = _certificate(n, new)
            if cert not in out:
                out[cert] = tuple(new)
    return tuple(sorted(out.values()))


def all_graphs(n: int) -> Iterator[Graph]:
    """One representative per isomorphism class on n vertices (adding a vertex in every way)."""
    for rows in _nonisomorphic(n):
        yield Graph(n, list(rows), check=False)


KNOWN_COUNTS = {1: 1, 2: 2, 3: 4, 4: 11, 5: 34, 6: 156, 7: 1044, 8: 12346}
