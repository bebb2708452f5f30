"""Synthetic regularity instances and pair auditing.

Real regularity partitions are out of reach at desk scale, so instances are
built the other way round: pick a reduced graph, blow every vertex up into a
cluster, and fill each reduced edge with a random dense bipartite pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import PreconditionError
from .graphs import Graph, iter_bits, mask_of


@dataclass(frozen=True)
class ClusterMap:
    clusters: tuple[tuple[int, ...], ...]
    reduced: Graph
    densities: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.reduced.n != len(self.clusters):
            raise PreconditionError("reduced graph order must equal cluster count")
        seen = set()
        for c in self.clusters:
            if seen.intersection(c):
                raise PreconditionError("clusters must be pairwise disjoint")
            seen.update(c)

    @property
    def cluster_of(self) -> dict[int, int]:
        return {v: i for i, c in enumerate(self.clusters) for v in c}

    def mask(self, i: int) -> int:
        return mask_of(self.clusters[i])


@dataclass(frozen=True)
class Witness:
    X: tuple[int, ...]
    Y: tuple[int, ...]
    deviation: Fraction


@dataclass
class DegreeReport:
    d: Fraction
    violators_A: list[int] = field(default_factory=list)
    violators_B: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violators_A and not self.violators_B


def _as_mask(G: Graph, vertices: Iterable[int]) -> tuple[list[int], int]:
    vs = sorted(set(vertices))
    if any(v < 0 or v >= G.n for v in vs):
        raise PreconditionError("vertex id out of range")
    return vs, mask_of(vs)


def density(G: Graph, A: Iterable[int], B: Iterable[int]) -> Fraction:
    """Exact edge density e(A,B)/(|A||B|) of two disjoint nonempty sets."""
    a, am = _as_mask(G, A)
    b, bm = _as_mask(G, B)
    if not a or not b:
        raise PreconditionError("density needs nonempty sets")
    if am & bm:
        raise PreconditionError("density needs disjoint sets")
    return Fraction(G.edges_between(am, bm), len(a) * len(b))


def blowup_instance(R: Graph, L: int, d_lo, seed: int, p_edge=None) -> tuple[Graph, ClusterMap]:
    """Blow up ``R``: cluster ``i`` is ``range(i*L, (i+1)*L)``.

    Each reduced edge becomes a random bipartite pair where every cross pair
    is present with probability ``p_edge`` (default halfway between ``d_lo``
    and 1); pairs that land below ``d_lo`` are topped up with random missing
    edges. Non-edges of ``R`` and cluster interiors stay empty.
    """
    d_lo = Fraction(d_lo)
    if L < 1 or not 0 < d_lo <= 1:
        raise PreconditionError("need L >= 1 and 0 < d_lo <= 1")
    p = Fraction(p_edge) if p_edge is not None else (1 + d_lo) / 2
    ell = R.n
    n = ell * L
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=bool)
    need = math.ceil(d_lo * L * L)
    dens = [[Fraction(0)] * ell for _ in range(ell)]
    for a, b in R.edges():
        block = rng.random((L, L)) < float(p)
        have = int(block.sum())
        if have < need:
            missing = np.flatnonzero(~block.ravel())
            fill = rng.permutation(missing)[: need - have]
            block.ravel()[fill] = True
            have = need
        adj[a * L:(a + 1) * L, b * L:(b + 1) * L] = block
        adj[b * L:(b + 1) * L, a * L:(a + 1) * L] = block.T
        dens[a][b] = dens[b][a] = Fraction(have, L * L)
    G = Graph.from_matrix(adj)
    clusters = tuple(tuple(range(i * L, (i + 1) * L)) for i in range(ell))
    return G, ClusterMap(clusters, R, tuple(tuple(r) for r in dens))


def _subset_sizes_floor(eps: Fraction, size: int) -> int:
    """Smallest admissible subset size, i.e. the least integer above eps*size."""
    return math.floor(eps * size) + 1


def refute_regularity(G: Graph, A, B, eps, budget: int = 10_000, seed: int = 0,
                      exhaustive_cap: int = 16) -> Witness | None:
    """Search for subsets X, Y violating eps-regularity of the pair (A, B).

    Exhaustive when ``|A| + |B| <= exhaustive_cap``: returns the largest
    deviation, the first one in X-major subset-mask order on ties. Otherwise
    samples ``budget`` pairs whose sizes are uniform above the eps-fraction
    floor. ``None`` only means that no witness was found.
    """
    eps = Fraction(eps)
    a, am = _as_mask(G, A)
    b, bm = _as_mask(G, B)
    if not a or not b:
        raise PreconditionError("both sides must be nonempty")
    if am & bm:
        raise PreconditionError("sides must be disjoint")
    base = Fraction(G.edges_between(am, bm), len(a) * len(b))
    xmin, ymin = _subset_sizes_floor(eps, len(a)), _subset_sizes_floor(eps, len(b))
    if xmin > len(a) or ymin > len(b):
        return None
    aindex = {v: i for i, v in enumerate(a)}
    bindex = {v: i for i, v in enumerate(b)}
    local = []
    for v in a:
        r = 0
        for u in iter_bits(G.rows[v] & bm):
            r |= 1 << bindex[u]
        local.append(r)

    best = None
    if len(a) + len(b) <= exhaustive_cap:
        na, nb = len(a), len(b)
        back = []
        for v in b:
            r = 0
            for u in iter_bits(G.rows[v] & am):
                r |= 1 << aindex[u]
            back.append(r)
        e = [0] * (1 << nb)
        for xmask in range(1, 1 << na):
            xsize = xmask.bit_count()
            if xsize < xmin:
                continue
            cnt = [(r & xmask).bit_count() for r in back]
            for ymask in range(1, 1 << nb):
                low = (ymask & -ymask).bit_length() - 1
                e[ymask] = e[ymask & (ymask - 1)] + cnt[low]
                ysize = ymask.bit_count()
                if ysize < ymin:
                    continue
                dev = abs(Fraction(e[ymask], xsize * ysize) - base)
                if dev >= eps and (best is None or dev > best[2]):
                    best = (xmask, ymask, dev)
        if best is None:
            return None
        xmask, ymask, dev = best
        return Witness(tuple(a[i] for i in iter_bits(xmask)),
                       tuple(b[j] for j in iter_bits(ymask)), dev)

    rng = np.random.default_rng(seed)
    for _ in range(budget):
        xs = int(rng.integers(xmin, len(a) + 1))
        ys = int(rng.integers(ymin, len(b) + 1))
        xi = rng.choice(len(a), size=xs, replace=False)
        yi = rng.choice(len(b), size=ys, replace=False)
        ymask = 0
        for j in yi:
            ymask |= 1 << int(j)
        e = sum((local[int(i)] & ymask).bit_count() for i in xi)
        dev = abs(Fraction(e, xs * ys) - base)
        if dev >= eps and (best is None or dev > best[2]):
            best = (tuple(sorted(a[int(i)] for i in xi)), tuple(sorted(b[int(j)] for j in yi)), dev)
    if best is None:
        return None
    return Witness(*best)


def super_regular_degree_check(G: Graph, A, B, d) -> DegreeReport:
    """List vertices whose degree into the opposite side is not above d times its size."""
    d = Fraction(d)
    a, am = _as_mask(G, A)
    b, bm = _as_mask(G, B)
    if not a or not b or am & bm:
        raise PreconditionError("sides must be nonempty and disjoint")
    rep = DegreeReport(d)
    rep.violators_A = [v for v in a if not (G.rows[v] & bm).bit_count() > d * len(b)]
    rep.violators_B = [v for v in b if not (G.rows[v] & am).bit_count() > d * len(a)]
    return rep
