"""Bit-row graph and digraph types, small generators, text I/O and Ore statistics.

A vertex set is passed around either as an ``int`` bitmask (internally) or as
any iterable of vertex ids (at API boundaries). Rows are Python ints, so
neighbourhood intersections are single ``&`` operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import PreconditionError

MAX_ORDER = 4096


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> list[int]:
    return list(iter_bits(mask))


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount(mask: int) -> int:
    return mask.bit_count()


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class Graph:
    """Simple undirected graph on vertices ``0..n-1`` stored as bit rows."""

    __slots__ = ("n", "rows", "_m", "_deg")

    def __init__(self, n: int, rows: Sequence[int], check: bool = True):
        if n < 0 or n > MAX_ORDER:
            raise PreconditionError(f"graph order {n} outside [0, {MAX_ORDER}]")
        if len(rows) != n:
            raise PreconditionError("one adjacency row per vertex required")
        rows = tuple(int(r) for r in rows)
        if check:
            full = (1 << n) - 1
            for u, r in enumerate(rows):
                if r & ~full:
                    raise PreconditionError(f"row {u} references a vertex >= n")
                if (r >> u) & 1:
                    raise PreconditionError(f"self-loop at {u}")
                for v in iter_bits(r):
                    if not (rows[v] >> u) & 1:
                        raise PreconditionError(f"asymmetric pair ({u}, {v})")
        self.n = n
        self.rows = rows
        self._m = None
        self._deg = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) out of range")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows, check=False)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Graph":
        """Build from a symmetric boolean matrix with a zero diagonal."""
        a = np.asarray(matrix, dtype=bool)
        n = a.shape[0]
        if a.shape != (n, n) or a.diagonal().any() or (a != a.T).any():
            raise PreconditionError("matrix must be square, symmetric, zero diagonal")
        packed = np.packbits(a, axis=1, bitorder="little")
        rows = [int.from_bytes(packed[i].tobytes(), "little") for i in range(n)]
        return cls(n, rows, check=False)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n, check=False)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, [full ^ (1 << v) for v in range(n)], check=False)

    @property
    def m(self) -> int:
        if self._m is None:
            self._m = sum(r.bit_count() for r in self.rows) // 2
        return self._m

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def degrees(self) -> tuple[int, ...]:
        if self._deg is None:
            self._deg = tuple(r.bit_count() for r in self.rows)
        return self._deg

    def degree(self, v: int) -> int:
        return self.degrees()[v]

    def degree_into(self, v: int, mask: int) -> int:
        return (self.rows[v] & mask).bit_count()

    def neighbors(self, v: int) -> list[int]:
        return bits(self.rows[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, r in enumerate(self.rows):
            for v in iter_bits(r >> (u + 1)):
                yield u, u + 1 + v

    def edges_between(self, a: int, b: int) -> int:
        """Count edges with one end in mask ``a`` and the other in mask ``b`` (disjoint)."""
        return sum((self.rows[u] & b).bit_count() for u in iter_bits(a))

    def edges_inside(self, a: int) -> int:
        return sum((self.rows[u] & a).bit_count() for u in iter_bits(a)) // 2

    def is_clique(self, mask: int) -> bool:
        for u in iter_bits(mask):
            if (self.rows[u] | (1 << u)) & mask != mask:
                return False
        return True

    def is_independent(self, mask: int) -> bool:
        return all(not (self.rows[u] & mask) for u in iter_bits(mask))

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Subgraph induced on ``vertices``; new id ``i`` is ``vertices[i]``."""
        index = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            r = 0
            for u in iter_bits(self.rows[v]):
                j = index.get(u)
                if j is not None:
                    r |= 1 << j
            rows.append(r)
        return Graph(len(vertices), rows, check=False)

    def add_universal(self, count: int) -> "Graph":
        """Append ``count`` vertices adjacent to everything, including each other."""
        n2 = self.n + count
        new = mask_of(range(self.n, n2))
        rows = [r | new for r in self.rows]
        full = (1 << n2) - 1
        rows += [full ^ (1 << v) for v in range(self.n, n2)]
        return Graph(n2, rows, check=False)

    def with_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = list(self.rows)
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"self-loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(self.n, rows, check=False)

    def without_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = list(self.rows)
        for u, v in edges:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        return Graph(self.n, rows, check=False)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class Digraph:
    """Loopless directed graph on ``0..n-1`` with out-neighbour bit rows."""

    __slots__ = ("n", "out", "_inn")

    def __init__(self, n: int, out: Sequence[int]):
        if len(out) != n:
            raise PreconditionError("one out-row per vertex required")
        out = tuple(int(r) for r in out)
        for u, r in enumerate(out):
            if (r >> u) & 1:
                raise PreconditionError(f"self-loop at {u}")
            if r >> n:
                raise PreconditionError(f"row {u} references a vertex >= n")
        self.n = n
        self.out = out
        self._inn = None

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        out = [0] * n
        for u, v in arcs:
            if u == v:
                raise PreconditionError(f"self-loop at {u}")
            out[u] |= 1 << v
        return cls(n, out)

    @property
    def inn(self) -> tuple[int, ...]:
        if self._inn is None:
            inn = [0] * self.n
            for u, r in enumerate(self.out):
                for v in iter_bits(r):
                    inn[v] |= 1 << u
            self._inn = tuple(inn)
        return self._inn

    def arcs(self) -> Iterator[tuple[int, int]]:
        for u, r in enumerate(self.out):
            for v in iter_bits(r):
                yield u, v

    @property
    def m(self) -> int:
        return sum(r.bit_count() for r in self.out)

    def out_degree(self, v: int) -> int:
        return self.out[v].bit_count()

    def min_out_degree(self) -> int:
        return min((r.bit_count() for r in self.out), default=0)

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.n == other.n and self.out == other.out

    def __hash__(self):
        return hash((self.n, self.out))

    def __repr__(self):
        return f"Digraph(n={self.n}, m={self.m})"


def complement(G: Graph) -> Graph:
    full = G.full_mask
    return Graph(G.n, [full ^ r ^ (1 << v) for v, r in enumerate(G.rows)], check=False)


def complete_multipartite(sizes: Sequence[int]) -> Graph:
    """Complete multipartite graph; part ``i`` occupies a contiguous id range."""
    if not sizes:
        raise PreconditionError("at least one part is required")
    if any(s < 1 for s in sizes):
        raise PreconditionError("part sizes must be positive")
    n = sum(sizes)
    full = (1 << n) - 1
    rows = []
    start = 0
    for s in sizes:
        part = ((1 << s) - 1) << start
        rows += [full ^ part] * s
        start += s
    return Graph(n, rows, check=False)


def part_ranges(sizes: Sequence[int]) -> list[list[int]]:
    out, start = [], 0
    for s in sizes:
        out.append(list(range(start, start + s)))
        start += s
    return out


def random_graph(n: int, p, seed: int) -> Graph:
    """Binomial random graph; reproducible for a given ``seed``."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise PreconditionError("edge probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    draws = rng.random((n, n))
    upper = np.triu(draws < float(p), k=1)
    return Graph.from_matrix(upper | upper.T)


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(t: int) -> Graph:
    """The star with centre 0 and ``t`` leaves."""
    return Graph.from_edges(t + 1, [(0, i) for i in range(1, t + 1)])


def disjoint_union(*graphs: Graph) -> Graph:
    rows, offset = [], 0
    for g in graphs:
        rows += [r << offset for r in g.rows]
        offset += g.n
    return Graph(offset, rows, check=False)


# ----------------------------------------------------------------- text format


def _data_lines(text: str) -> list[list[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line.split())
    return out


def _parse_edge_list(text: str) -> tuple[int, list[tuple[int, int]]]:
    lines = _data_lines(text)
    if not lines or len(lines[0]) != 2:
        raise PreconditionError("first line must be 'n m'")
    n, m = int(lines[0][0]), int(lines[0][1])
    body = lines[1:]
    if len(body) != m:
        raise PreconditionError(f"header announces {m} edges, found {len(body)}")
    edges = []
    for parts in body:
        if len(parts) != 2:
            raise PreconditionError(f"malformed edge line: {' '.join(parts)}")
        edges.append((int(parts[0]), int(parts[1])))
    return n, edges


def parse_graph(text: str) -> Graph:
    n, edges = _parse_edge_list(text)
    seen = set()
    for u, v in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise PreconditionError(f"duplicate edge {key}")
        seen.add(key)
    return Graph.from_edges(n, edges)


def format_graph(G: Graph) -> str:
    lines = [f"{G.n} {G.m}"] + [f"{u} {v}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"


def parse_digraph(text: str) -> Digraph:
    n, arcs = _parse_edge_list(text)
    return Digraph.from_arcs(n, arcs)


def format_digraph(D: Digraph) -> str:
    lines = [f"{D.n} {D.m}"] + [f"{u} {v}" for u, v in D.arcs()]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh.read())


def write_graph(G: Graph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_graph(G))


def read_digraph(path) -> Digraph:
    with open(path, encoding="ascii") as fh:
        return parse_digraph(fh.read())


# ------------------------------------------------------------- Ore statistics


@dataclass(frozen=True)
class OreReport:
    min_sum: int | float
    witness_pair: tuple[int, int] | None
    threshold: Fraction
    margin: Fraction | float

    def as_dict(self) -> dict:
        inf = self.min_sum == math.inf
        return {
            "min_sum": "inf" if inf else self.min_sum,
            "witness_pair": list(self.witness_pair) if self.witness_pair else None,
            "threshold": str(self.threshold),
            "margin": "inf" if inf else str(self.margin),
        }


def ore_min_sum(G: Graph) -> tuple[int | float, tuple[int, int] | None]:
    """Minimum of d(x)+d(y) over nonadjacent pairs, with a pair attaining it."""
    deg = G.degrees()
    order = sorted(range(G.n), key=lambda v: (deg[v], v))
    best, pair = math.inf, None
    if G.n < 2:
        return best, pair
    low = deg[order[0]]
    for x in order:
        if deg[x] + low >= best:
            break
        non = ~G.rows[x]
        for y in order:
            if deg[x] + deg[y] >= best:
                break
            if y != x and (non >> y) & 1:
                best, pair = deg[x] + deg[y], (min(x, y), max(x, y))
                break
    return best, pair


def ore_report(G: Graph, H: Graph | None = None, *, chi_cr: Fraction | None = None) -> OreReport:
    """Ore statistics of ``G`` against the threshold ``2(1 - 1/chi_cr(H)) n``."""
    if chi_cr is None:
        if H is None:
            raise PreconditionError("either H or chi_cr is required")
        from .chromatic import chi_critical

        chi_cr = chi_critical(H)
    threshold = 2 * (1 - 1 / Fraction(chi_cr)) * G.n
    best, pair = ore_min_sum(G)
    margin = math.inf if best == math.inf else best - threshold
    return OreReport(best, pair, threshold, margin)
