"""H-tilings: copy enumeration, exact branch-and-bound, greedy, padding and cluster embedding.

Copies are vertex sets (bitmasks inside, sorted tuples at the API). Twin
vertices, i.e. pairs with equal neighbourhoods up to each other, are
interchangeable; the exact solver uses this to collapse symmetric branches,
which is what makes complete multipartite hosts cheap.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from typing import Iterator, Sequence

from .errors import BudgetExhausted, LemmaViolation, PreconditionError
from .graphs import Graph, bits, iter_bits, lowest, mask_of, ore_min_sum

PATTERN_CAP = 12


@dataclass
class TilingResult:
    copies: list[tuple[int, ...]]
    leftover: tuple[int, ...]
    optimal: bool
    nodes_explored: int
    info: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.copies)

    def as_dict(self) -> dict:
        out = {
            "copies": [list(c) for c in self.copies],
            "leftover": list(self.leftover),
            "optimal": self.optimal,
            "nodes_explored": self.nodes_explored,
        }
        if self.info:
            out["info"] = self.info
        return out


class _Pattern:
    """Search orders for embedding H, one per choice of the anchored H-vertex."""

    def __init__(self, H: Graph):
        if H.n == 0:
            raise PreconditionError("pattern graph must have a vertex")
        self.H = H
        self.h = H.n
        self.deg = H.degrees()
        self.min_degree = min(self.deg)
        self.orders = []
        for a in range(H.n):
            order, placed = [a], 1 << a
            while len(order) < H.n:
                rest = [b for b in range(H.n) if not (placed >> b) & 1]
                b = max(rest, key=lambda x: ((H.rows[x] & placed).bit_count(), self.deg[x], -x))
                order.append(b)
                placed |= 1 << b
            pos = {b: i for i, b in enumerate(order)}
            back = [[pos[c] for c in iter_bits(H.rows[b]) if pos[c] < i] for i, b in enumerate(order)]
            need = [self.deg[b] for b in order]
            self.orders.append((order, back, need))


@lru_cache(maxsize=256)
def _pattern(H: Graph) -> _Pattern:
    return _Pattern(H)


class _Host:
    """Host graph plus its twin classes (vertices with equal neighbourhoods)."""

    def __init__(self, G: Graph):
        self.G = G
        rows = G.rows
        open_groups: dict[int, list[int]] = {}
        closed_groups: dict[int, list[int]] = {}
        for v, r in enumerate(rows):
            open_groups.setdefault(r, []).append(v)
            closed_groups.setdefault(r | (1 << v), []).append(v)
        cls = list(range(G.n))
        classes = []
        for groups in (open_groups, closed_groups):
            for members in groups.values():
                if len(members) > 1:
                    cid = len(classes)
                    classes.append(members)
                    for v in members:
                        cls[v] = G.n + cid
        self.cls = cls
        self.classes = classes
        self.single_mask = mask_of(v for v in range(G.n) if cls[v] < G.n)
        self.class_masks = [mask_of(m) for m in classes]
        self.prefix = [[mask_of(m[:c]) for c in range(len(m) + 1)] for m in classes]

    def canonical(self, avail: int) -> int:
        key = avail & self.single_mask
        for cm, pre in zip(self.class_masks, self.prefix):
            key |= pre[(avail & cm).bit_count()]
        return key


def _embeddings(G: Graph, pat: _Pattern, avail: int, v: int, host: _Host | None,
                above: bool) -> Iterator[int]:
    """Yield vertex sets of H-copies inside ``avail`` that contain ``v``.

    With ``host`` given, only twin-canonical sets are produced (within each
    twin class the lowest free members are used). With ``above`` set, every
    other vertex of the copy exceeds ``v``, so each set is met from its
    lowest vertex only.
    """
    rows = G.rows
    h = pat.h
    seen = set()
    avail_v = avail | (1 << v)
    if above:
        avail_v &= ~((1 << v) - 1)
    dv = (rows[v] & avail_v).bit_count()
    img = [0] * h
    for order, back, need in pat.orders:
        if need[0] > dv:
            continue
        img[0] = v

        def candidates(i, used):
            cand = avail_v & ~used
            for j in back[i]:
                cand &= rows[img[j]]
            out = []
            tried = set()
            for x in iter_bits(cand):
                if (rows[x] & avail_v).bit_count() < need[i]:
                    continue
                if host is not None:
                    c = host.cls[x]
                    if c in tried:
                        continue
                    tried.add(c)
                out.append(x)
            return out

        if h == 1:
            if (1 << v) not in seen:
                seen.add(1 << v)
                yield 1 << v
            continue
        first = 1 << v
        stack = [(1, iter(candidates(1, first)), first)]
        while stack:
            i, it, before = stack[-1]
            x = next(it, None)
            if x is None:
                stack.pop()
                continue
            img[i] = x
            used = before | (1 << x)
            if i + 1 == h:
                if used not in seen:
                    seen.add(used)
                    yield used
            else:
                stack.append((i + 1, iter(candidates(i + 1, used)), used))


def _copy_tuple(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def contains_pattern(G: Graph, S: Sequence[int], H: Graph) -> bool:
    """True iff G[S] contains H as a spanning subgraph (requires |S| = |H|)."""
    if len(S) != H.n:
        return False
    sm = mask_of(S)
    return next(_embeddings(G, _pattern(H), sm, lowest(sm), None, False), None) is not None


def verify_copy(G: Graph, S: Sequence[int], H: Graph) -> bool:
    """Independent containment check through networkx monomorphism search."""
    from networkx.algorithms.isomorphism import GraphMatcher

    if len(set(S)) != H.n:
        return False
    sub = G.induced(sorted(S)).to_networkx()
    return GraphMatcher(sub, H.to_networkx()).subgraph_is_monomorphic()


def enumerate_copies(G: Graph, H: Graph, limit: int | None = None) -> tuple[list[tuple[int, ...]], bool]:
    """All vertex sets hosting a copy of H, in order of lowest vertex; returns (sets, truncated)."""
    if H.n > PATTERN_CAP:
        raise PreconditionError(f"pattern order above the cap of {PATTERN_CAP}")
    pat = _pattern(H)
    out = []
    full = G.full_mask
    for v in range(G.n):
        for s in _embeddings(G, pat, full, v, None, True):
            if limit is not None and len(out) >= limit:
                return out, True
            out.append(_copy_tuple(s))
    return out, False


class _Stop(Exception):
    pass


def _dead_vertices(rows, avail: int, min_degree: int) -> int:
    """Vertices of ``avail`` that cannot lie in any copy (fixpoint of low degree)."""
    dead = 0
    while True:
        new = 0
        live = avail & ~dead
        for x in iter_bits(live):
            if (rows[x] & live).bit_count() < min_degree:
                new |= 1 << x
        if not new:
            return dead
        dead |= new


def max_tiling(G: Graph, H: Graph, budget: int = 1_000_000, within: int | None = None) -> TilingResult:
    """Maximum H-tiling by branch-and-bound.

    Branches on the lowest live vertex: each copy containing it (twin-canonical
    copies only, in generation order), then the branch that discards it.
    ``budget`` caps the number of search nodes; on exhaustion the best tiling
    found so far is returned with ``optimal=False``. ``within`` restricts the
    search to a vertex mask.
    """
    if H.m == 0:
        raise PreconditionError("pattern graph must have an edge")
    if H.n > PATTERN_CAP:
        raise PreconditionError(f"pattern order above the cap of {PATTERN_CAP}")
    pat = _pattern(H)
    host = _Host(G)
    rows = G.rows
    h = pat.h
    start = G.full_mask if within is None else within
    root_dead = _dead_vertices(rows, start, pat.min_degree)
    ceiling = ((start & ~root_dead).bit_count()) // h
    best: list[int] = []
    chosen: list[int] = []
    memo: dict[int, int] = {}
    nodes = 0

    def search(avail: int) -> bool:
        nonlocal nodes, best
        nodes += 1
        if nodes > budget:
            raise _Stop
        if len(chosen) > len(best):
            best = list(chosen)
            if len(best) == ceiling:
                return True
        avail &= ~_dead_vertices(rows, avail, pat.min_degree)
        if len(chosen) + avail.bit_count() // h <= len(best):
            return False
        key = host.canonical(avail)
        if memo.get(key, -1) >= len(chosen):
            return False
        memo[key] = len(chosen)
        v = lowest(avail)
        for s in _embeddings(G, pat, avail, v, host, False):
            chosen.append(s)
            done = search(avail & ~s)
            chosen.pop()
            if done:
                return True
        return search(avail & ~(1 << v))

    optimal = True
    try:
        search(start)
    except _Stop:
        optimal = False
    covered = 0
    for s in best:
        covered |= s
    copies = sorted(_copy_tuple(s) for s in best)
    leftover = tuple(iter_bits(start & ~covered))
    return TilingResult(copies, leftover, optimal, min(nodes, budget))


def greedy_tiling(G: Graph, H: Graph, seed: int = 0, sample: int = 256) -> TilingResult:
    """Greedy H-tiling that always starts from a hardest vertex.

    Each round looks at the live vertex of least residual degree, collects up
    to ``sample`` copies through it and removes one (random among ties) that
    destroys the fewest residual edges.
    """
    if H.m == 0:
        raise PreconditionError("pattern graph must have an edge")
    pat = _pattern(H)
    rows = G.rows
    rng = random.Random(seed)
    avail = G.full_mask
    copies = []
    while True:
        avail &= ~_dead_vertices(rows, avail, pat.min_degree)
        if avail.bit_count() < pat.h:
            break
        order = sorted(iter_bits(avail), key=lambda x: ((rows[x] & avail).bit_count(), x))
        picked = None
        for v in order:
            cands = list(islice(_embeddings(G, pat, avail, v, None, False), sample))
            if not cands:
                avail &= ~(1 << v)
                continue
            damage = [sum((rows[x] & avail & ~s).bit_count() for x in iter_bits(s)) for s in cands]
            low = min(damage)
            picked = rng.choice([s for s, d in zip(cands, damage) if d == low])
            break
        if picked is None:
            break
        copies.append(picked)
        avail &= ~picked
    covered = 0
    for s in copies:
        covered |= s
    return TilingResult(sorted(_copy_tuple(s) for s in copies),
                        tuple(iter_bits(G.full_mask & ~covered)), False, len(copies))


def has_factor(G: Graph, H: Graph, budget: int = 1_000_000) -> str:
    """Three-valued H-factor test: ``"yes"``, ``"no"`` or ``"unknown"`` (budget)."""
    if G.n % H.n:
        raise PreconditionError("pattern order must divide host order")
    res = max_tiling(G, H, budget)
    if not res.leftover:
        return "yes"
    return "no" if res.optimal else "unknown"


def padding_bound(k: int, s: int) -> int:
    return k * (k - 1) * s + (k - 1) ** 2


def kk_tiling_padded(G: Graph, k: int, s: int, budget: int = 2_000_000) -> TilingResult:
    """K_k-tiling of a graph that misses the Ore bound for K_k by at most 2s.

    Pads G with ``k*s + r`` universal vertices so that the order becomes
    divisible by k, finds a K_k-factor of the padded graph and drops every
    copy that touches padding. A last bounded pass re-tiles the uncovered
    vertices, which can only help.
    """
    if k < 2 or s < 0:
        raise PreconditionError("need k >= 2 and s >= 0")
    n = G.n
    need = 2 * (1 - Fraction(1, k)) * n - 2 * s
    low, pair = ore_min_sum(G)
    if low < need:
        raise PreconditionError(f"Ore hypothesis fails: pair {pair} has degree sum {low} < {need}")
    r = (-(n + k * s)) % k
    pad = k * s + r
    P = G.add_universal(pad)
    Kk = Graph.complete(k)
    res = max_tiling(P, Kk, budget)
    if res.leftover:
        if not res.optimal:
            raise BudgetExhausted("factor search in the padded graph ran out of budget", partial=res)
        raise LemmaViolation("padded graph has no K_k-factor", witness={"n": n, "k": k, "s": s})
    kept = [c for c in res.copies if c[-1] < n]
    covered = mask_of(v for c in kept for v in c)
    rest = G.full_mask & ~covered
    extra = max_tiling(G, Kk, budget=20_000, within=rest) if rest else None
    if extra is not None:
        kept += extra.copies
        covered |= mask_of(v for c in extra.copies for v in c)
    leftover = tuple(iter_bits(G.full_mask & ~covered))
    bound = padding_bound(k, s)
    if len(leftover) > bound:
        raise LemmaViolation(f"leftover {len(leftover)} exceeds padding bound {bound}",
                             witness={"n": n, "k": k, "s": s})
    info = {"padding": pad, "bound": bound, "padded_nodes": res.nodes_explored}
    return TilingResult(sorted(kept), leftover, False, res.nodes_explored, info)


# ------------------------------------------------------------ cluster embedding


def class_layout(H: Graph) -> list[tuple[int, ...]]:
    """Colour classes of an optimal colouring of H, smallest-neck class first."""
    from .chromatic import smallest_color_class

    prof = smallest_color_class(H)
    key = min((t for t in prof.optimal_class_size_multisets if t[0] == prof.sigma))
    classes = sorted(prof.witnesses[key], key=lambda c: (len(c), c))
    return [tuple(c) for c in classes]


def embed_in_clusters(G: Graph, clusters: Sequence[Sequence[int]], H: Graph,
                      small_class_position: int, seed: int = 0, retries: int = 50,
                      fixed: dict[int, int] | None = None,
                      check_sizes: bool = True) -> tuple[int, ...] | None:
    """Randomised greedy embedding of H with colour classes pinned to clusters.

    The smallest colour class goes to ``clusters[small_class_position]`` and
    the remaining classes fill the other clusters in order. ``fixed`` pre-places
    some H-vertices. Returns ``img`` with ``img[x]`` the host vertex of H-vertex
    ``x``, or ``None`` once ``retries`` restarts have failed.
    """
    classes = class_layout(H)
    if len(clusters) != len(classes):
        raise PreconditionError("need exactly one cluster per colour class")
    if check_sizes and any(len(c) < H.n for c in clusters):
        raise PreconditionError("every cluster needs at least |H| vertices")
    slots = [small_class_position] + [p for p in range(len(clusters)) if p != small_class_position]
    home = {}
    for cls_vertices, pos in zip(classes, slots):
        for x in cls_vertices:
            home[x] = mask_of(clusters[pos])
    fixed = dict(fixed or {})
    for x, v in fixed.items():
        if not (home[x] >> v) & 1:
            home[x] |= 1 << v
    order = list(fixed)
    placed = mask_of(order)
    while len(order) < H.n:
        rest = [x for x in range(H.n) if not (placed >> x) & 1]
        x = max(rest, key=lambda y: ((H.rows[y] & placed).bit_count(), H.degree(y), -y))
        order.append(x)
        placed |= 1 << x
    rows = G.rows
    rng = random.Random(seed)
    fixed_mask = mask_of(fixed.values())
    for _ in range(retries):
        img = [-1] * H.n
        used = 0
        for x, v in fixed.items():
            img[x] = v
            used |= 1 << v
        ok = True
        for x in order[len(fixed):]:
            cand = home[x] & ~used & ~fixed_mask
            for y in iter_bits(H.rows[x]):
                if img[y] >= 0:
                    cand &= rows[img[y]]
            if not cand:
                ok = False
                break
            pick = rng.choice(bits(cand))
            img[x] = pick
            used |= 1 << pick
        if ok and all(rows[img[a]] >> img[b] & 1 for a, b in H.edges()):
            return tuple(img)
    return None
