"""Star packings, complement matchings with Hall certificates, and copy-to-copy matchings."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import PreconditionError
from .graphs import Graph, iter_bits, mask_of, star_graph
from .tiling import max_tiling


@dataclass
class StarPacking:
    t: int
    stars: list[tuple[int, tuple[int, ...]]]
    optimal: bool | None = None

    @property
    def count(self) -> int:
        return len(self.stars)

    def vertices(self) -> set[int]:
        return {c for c, _ in self.stars} | {x for _, leaves in self.stars for x in leaves}


def _star_from_copy(G: Graph, copy: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    cm = mask_of(copy)
    for c in copy:
        if (G.rows[c] | (1 << c)) & cm == cm:
            return c, tuple(x for x in copy if x != c)
    raise AssertionError("copy without a centre")


def max_star_packing(G: Graph, t: int, budget: int = 1_000_000) -> StarPacking:
    """Maximum number of disjoint t-stars (exact unless the budget runs out)."""
    if t < 1:
        raise PreconditionError("t must be positive")
    res = max_tiling(G, star_graph(t), budget)
    return StarPacking(t, [_star_from_copy(G, c) for c in res.copies], res.optimal)


def greedy_star_packing(G: Graph, t: int) -> StarPacking:
    """Maximal t-star packing: afterwards no residual vertex has t residual neighbours.

    The centre is the residual vertex of least degree that still has t
    neighbours, and it takes its t neighbours of least residual degree.
    """
    if t < 1:
        raise PreconditionError("t must be positive")
    rows = G.rows
    avail = G.full_mask
    stars = []
    while True:
        best = None
        for v in iter_bits(avail):
            d = (rows[v] & avail).bit_count()
            if d >= t and (best is None or d < best[0]):
                best = (d, v)
        if best is None:
            break
        c = best[1]
        nbrs = sorted(iter_bits(rows[c] & avail), key=lambda x: ((rows[x] & avail).bit_count(), x))
        leaves = tuple(sorted(nbrs[:t]))
        stars.append((c, leaves))
        avail &= ~(mask_of(leaves) | (1 << c))
    return StarPacking(t, stars, None)


def residual_max_degree(G: Graph, packing: StarPacking) -> int:
    rest = G.full_mask & ~mask_of(packing.vertices())
    return max(((G.rows[v] & rest).bit_count() for v in iter_bits(rest)), default=0)


def star_bound(U1_size: int, delta_H: int, Delta: int, t: int, eps1) -> Fraction:
    """(delta - t + 1)(1 - 2 eps1)|U1| / (2 (t + 1) Delta)."""
    if Delta < 1:
        raise PreconditionError("maximum degree must be positive")
    eps1 = Fraction(eps1)
    return Fraction(delta_H - t + 1) * (1 - 2 * eps1) * U1_size / (2 * (t + 1) * Delta)


# --------------------------------------------------------------- matchings


@dataclass
class Matching:
    pairs: list[tuple[int, int]]


@dataclass
class HallViolator:
    S: tuple[int, ...]
    neighbors: tuple[int, ...]


def _kuhn(n_left: int, adjacent: Callable[[int], Sequence[int]], stop_on_failure: bool):
    """Augmenting-path matching; returns (match_right, failed_left, tree) where tree is
    the alternating tree (left set, right set) of the first failed vertex."""
    match_r: dict[int, int] = {}
    failed = []
    tree = None
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10_000))
    try:
        for a in range(n_left):
            seen_r: set[int] = set()
            seen_l: set[int] = set()

            def augment(x: int) -> bool:
                seen_l.add(x)
                for b in adjacent(x):
                    if b in seen_r:
                        continue
                    seen_r.add(b)
                    if b not in match_r or augment(match_r[b]):
                        match_r[b] = x
                        return True
                return False

            if not augment(a):
                failed.append(a)
                if tree is None:
                    tree = (sorted(seen_l), sorted(seen_r))
                if stop_on_failure:
                    break
    finally:
        sys.setrecursionlimit(limit)
    return match_r, failed, tree


def complement_perfect_matching(G: Graph, A: Sequence[int], B: Sequence[int]) -> Matching | HallViolator:
    """Perfect matching between A and B through non-edges of G, or a Hall violator S in A."""
    A, B = list(A), list(B)
    if len(A) != len(B):
        raise PreconditionError("sides must have equal size")
    if set(A) & set(B):
        raise PreconditionError("sides must be disjoint")
    rows = G.rows

    def adjacent(i):
        return [j for j, b in enumerate(B) if not (rows[A[i]] >> b) & 1]

    match_r, failed, tree = _kuhn(len(A), adjacent, stop_on_failure=True)
    if failed:
        left, right = tree
        return HallViolator(tuple(A[i] for i in left), tuple(B[j] for j in right))
    pairs = sorted((A[i], B[j]) for j, i in match_r.items())
    return Matching(pairs)


def complement_neighbors(G: Graph, S: Sequence[int], B: Sequence[int]) -> set[int]:
    return {b for b in B for a in S if not G.has_edge(a, b)}


@dataclass
class CopyMatching:
    pairs: list[tuple[int, int]]
    unmatched_left: list[int]
    unmatched_right: list[int]
    evaluations: int = 0
    memo: dict = field(default_factory=dict, repr=False)


def match_copies(left: Sequence, right: Sequence, compatible: Callable) -> CopyMatching:
    """Maximum matching of ``left`` items to ``right`` items under ``compatible(l, r)``.

    The predicate is evaluated lazily and at most once per index pair.
    """
    memo: dict[tuple[int, int], bool] = {}

    def ok(i, j):
        key = (i, j)
        if key not in memo:
            memo[key] = bool(compatible(left[i], right[j]))
        return memo[key]

    def adjacent(i):
        for j in range(len(right)):
            if ok(i, j):
                yield j

    match_r, _, _ = _kuhn(len(left), adjacent, stop_on_failure=False)
    pairs = sorted((i, j) for j, i in match_r.items())
    ml = {i for i, _ in pairs}
    return CopyMatching(pairs, [i for i in range(len(left)) if i not in ml],
                        [j for j in range(len(right)) if j not in match_r], len(memo), memo)
