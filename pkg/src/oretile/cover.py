"""Lexicographically maximal k-clique covers and the structure they force.

A k-clique cover partitions the vertex set into cliques of order at most k.
Covers are compared by the vector (|Phi_k|, ..., |Phi_1|) in lexicographic
order. Exact mode finds the maximum by a subset DP and is limited to small
graphs; heuristic mode stops at a fixed point of :func:`merge_step`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .bounds import PhiVector
from .errors import BudgetExhausted, LemmaViolation, PreconditionError
from .graphs import Graph, iter_bits, lowest, mask_of, ore_min_sum
from .packing import HallViolator, complement_neighbors, complement_perfect_matching

EXACT_CAP = 14


@dataclass
class CliqueCover:
    k: int
    families: dict[int, list[tuple[int, ...]]]
    certified: bool = False

    def __post_init__(self):
        fam = {i: sorted(tuple(sorted(c)) for c in self.families.get(i, ())) for i in range(1, self.k + 1)}
        extra = set(self.families) - set(fam)
        if extra:
            raise PreconditionError(f"clique orders {sorted(extra)} outside 1..k")
        self.families = fam

    @classmethod
    def from_cliques(cls, k: int, cliques: Iterable[Sequence[int]], certified: bool = False) -> "CliqueCover":
        fam: dict[int, list] = {}
        for c in cliques:
            fam.setdefault(len(c), []).append(tuple(c))
        return cls(k, fam, certified)

    @property
    def signature(self) -> tuple[int, ...]:
        return tuple(len(self.families[i]) for i in range(self.k, 0, -1))

    def cliques(self) -> Iterator[tuple[int, ...]]:
        for i in range(self.k, 0, -1):
            yield from self.families[i]

    def order(self) -> int:
        return sum(len(c) for c in self.cliques())

    def violations(self, G: Graph) -> list[str]:
        out = []
        seen: set[int] = set()
        for c in self.cliques():
            if seen.intersection(c):
                out.append(f"clique {c} overlaps another")
            seen.update(c)
            if not G.is_clique(mask_of(c)):
                out.append(f"{c} is not a clique")
        if seen != set(range(G.n)):
            out.append("cliques do not cover the vertex set")
        return out

    def format(self) -> str:
        return "".join(f"{len(c)}: {' '.join(map(str, c))}\n" for c in self.cliques())

    @classmethod
    def parse(cls, text: str, k: int) -> "CliqueCover":
        cliques = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(":")
            vs = tuple(int(x) for x in rest.split())
            if int(head) != len(vs):
                raise PreconditionError(f"line {line!r}: order does not match vertex count")
            cliques.append(vs)
        return cls.from_cliques(k, cliques)

    def as_dict(self) -> dict:
        return {
            "k": self.k, "certified": self.certified, "signature": list(self.signature),
            "families": {str(i): [list(c) for c in self.families[i]] for i in range(self.k, 0, -1)},
        }


# ---------------------------------------------------------------- exact DP


def _cliques_through(G: Graph, v: int, mask: int, k: int) -> Iterator[int]:
    """Masks of cliques of order <= k that contain v and lie inside mask."""
    rows = G.rows

    def grow(cur: int, cand: int, size: int):
        yield cur
        if size == k:
            return
        while cand:
            u = lowest(cand)
            cand &= cand - 1
            yield from grow(cur | (1 << u), cand & rows[u], size + 1)

    yield from grow(1 << v, rows[v] & mask, 1)


class _CoverDP:
    def __init__(self, G: Graph, k: int, budget: int):
        self.G, self.k = G, k
        self.budget = budget
        self.best: dict[int, tuple[int, ...]] = {0: (0,) * k}

    def sig(self, size: int) -> tuple[int, ...]:
        s = [0] * self.k
        s[self.k - size] = 1
        return tuple(s)

    def solve(self, mask: int) -> tuple[int, ...]:
        best = self.best
        if mask in best:
            return best[mask]
        # iterative post-order so deep masks do not hit the recursion limit
        stack = [mask]
        while stack:
            m = stack[-1]
            if m in best:
                stack.pop()
                continue
            v = lowest(m)
            pending = []
            options = []
            for c in _cliques_through(self.G, v, m, self.k):
                rest = m & ~c
                if rest in best:
                    options.append((c, rest))
                else:
                    pending.append(rest)
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            self.budget -= len(options)
            if self.budget < 0:
                raise BudgetExhausted("clique cover search ran out of budget")
            top = None
            for c, rest in options:
                cand = tuple(a + b for a, b in zip(self.sig(c.bit_count()), best[rest]))
                if top is None or cand > top:
                    top = cand
            best[m] = top
        return best[mask]

    def covers(self, mask: int) -> Iterator[list[int]]:
        if mask == 0:
            yield []
            return
        target = self.solve(mask)
        v = lowest(mask)
        for c in _cliques_through(self.G, v, mask, self.k):
            rest = mask & ~c
            cand = tuple(a + b for a, b in zip(self.sig(c.bit_count()), self.solve(rest)))
            if cand == target:
                for tail in self.covers(rest):
                    yield [c] + tail


def _to_cover(k: int, masks: Sequence[int], certified: bool) -> CliqueCover:
    return CliqueCover.from_cliques(k, [tuple(iter_bits(c)) for c in masks], certified)


def maximal_clique_cover(G: Graph, k: int, mode: str = "exact", budget: int = 5_000_000) -> CliqueCover:
    """A lexicographically maximal k-clique cover (``exact``) or a merge-stable one (``heuristic``)."""
    if k < 2:
        raise PreconditionError("k must be at least 2")
    if mode == "exact":
        if G.n > EXACT_CAP:
            raise PreconditionError(f"exact covers are limited to n <= {EXACT_CAP}")
        dp = _CoverDP(G, k, budget)
        dp.solve(G.full_mask)
        return _to_cover(k, next(dp.covers(G.full_mask)), True)
    if mode == "heuristic":
        cover = greedy_cover(G, k)
        while True:
            nxt = merge_step(G, cover)
            if nxt is None:
                return cover
            cover = nxt
    raise PreconditionError(f"unknown mode {mode!r}")


def all_maximal_covers(G: Graph, k: int, limit: int | None = None,
                       budget: int = 5_000_000) -> tuple[list[CliqueCover], bool]:
    """Every lexicographically maximal cover, up to ``limit``; second item is the truncation flag."""
    if G.n > EXACT_CAP:
        raise PreconditionError(f"exact covers are limited to n <= {EXACT_CAP}")
    dp = _CoverDP(G, k, budget)
    out = []
    for masks in dp.covers(G.full_mask):
        if limit is not None and len(out) >= limit:
            return out, True
        out.append(_to_cover(k, masks, True))
    return out, False


def max_cover_signature(G: Graph, k: int, budget: int = 5_000_000) -> tuple[int, ...]:
    return _CoverDP(G, k, budget).solve(G.full_mask)


# ------------------------------------------------------------ heuristic mode


def _find_clique(G: Graph, avail: int, r: int) -> int | None:
    rows = G.rows

    def grow(cur: int, cand: int, size: int):
        if size == r:
            return cur
        if size + cand.bit_count() < r:
            return None
        while cand:
            u = max(iter_bits(cand), key=lambda x: ((rows[x] & cand).bit_count(), -x))
            cand &= ~(1 << u)
            got = grow(cur | (1 << u), cand & rows[u], size + 1)
            if got is not None:
                return got
            if size + cand.bit_count() < r:
                return None
        return None

    return grow(0, avail, 0)


def _greedy_pack(G: Graph, avail: int, k: int) -> list[int]:
    out = []
    for r in range(k, 0, -1):
        while avail:
            c = _find_clique(G, avail, r)
            if c is None:
                break
            out.append(c)
            avail &= ~c
    return out


def greedy_cover(G: Graph, k: int) -> CliqueCover:
    """Extract k-cliques while any remain, then (k-1)-cliques, and so on."""
    return _to_cover(k, _greedy_pack(G, G.full_mask, k), False)


def merge_step(G: Graph, cover: CliqueCover) -> CliqueCover | None:
    """Merge two same-order cliques without a complement perfect matching into a larger one.

    With S the Hall violator and T the part of the second clique joined to all
    of S, the set S + T is a clique with more than i vertices; its first i+1
    vertices become the new clique and the rest are packed greedily.
    """
    k = cover.k
    for i in range(k - 1, 0, -1):
        fam = cover.families[i]
        for a, b in combinations(range(len(fam)), 2):
            K, Kp = fam[a], fam[b]
            res = complement_perfect_matching(G, K, Kp)
            if not isinstance(res, HallViolator):
                continue
            S = res.S
            T = sorted(set(Kp) - complement_neighbors(G, S, Kp))
            Q = sorted(set(S) | set(T))[: i + 1]
            if len(Q) < i + 1 or not G.is_clique(mask_of(Q)):
                raise LemmaViolation("Hall violator did not yield a larger clique",
                                     witness={"K": K, "K'": Kp, "S": S})
            rest = mask_of(K) | mask_of(Kp)
            rest &= ~mask_of(Q)
            cliques = [c for c in cover.cliques() if c != K and c != Kp]
            cliques.append(tuple(Q))
            cliques += [tuple(iter_bits(c)) for c in _greedy_pack(G, rest, k)]
            return CliqueCover.from_cliques(k, cliques, False)
    return None


# ------------------------------------------------------------- structure


class Connection(enum.Enum):
    WELL = "Well"
    OVER = "Over"
    UNDER = "Under"


@dataclass(frozen=True)
class ConnectionClass:
    kind: Connection
    edges: int


def classify_connection(G: Graph, Ki: Sequence[int], Kj: Sequence[int]) -> ConnectionClass:
    i, j = len(Ki), len(Kj)
    mi, mj = mask_of(Ki), mask_of(Kj)
    if i > j:
        raise PreconditionError("first clique must not be larger than the second")
    if mi & mj:
        raise PreconditionError("cliques must be disjoint")
    if not (G.is_clique(mi) and G.is_clique(mj)):
        raise PreconditionError("both sets must be cliques")
    e = G.edges_between(mi, mj)
    if all(G.degree_into(v, mj) == j - 1 for v in Ki):
        return ConnectionClass(Connection.WELL, e)
    if e >= i * (j - 1):
        return ConnectionClass(Connection.OVER, e)
    return ConnectionClass(Connection.UNDER, e)


def ab_partition(G: Graph, K1: Sequence[int], K2: Sequence[int], Kj: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split Kj into the i vertices missing one vertex of K1 (A) and the rest (B)."""
    i, j = len(K1), len(Kj)
    if len(K2) != i:
        raise PreconditionError("K1 and K2 must have the same order")
    m1, m2 = mask_of(K1), mask_of(K2)
    mj = mask_of(Kj)
    target = i * (j - 1)
    if G.edges_between(m1, mj) != target or G.edges_between(m2, mj) != target:
        raise PreconditionError("both cliques need exactly i(j-1) edges to Kj")
    A = tuple(v for v in sorted(Kj) if G.degree_into(v, m1) == i - 1)
    B = tuple(v for v in sorted(Kj) if G.degree_into(v, m1) == i)
    ok = (len(A) == i and len(B) == j - i
          and all(G.degree_into(v, m2) == i - 1 for v in A)
          and all(G.degree_into(v, m2) == i for v in B))
    if not ok:
        raise LemmaViolation("degree pattern into the pair does not split as i + (j-i)",
                             witness={"K1": tuple(K1), "K2": tuple(K2), "Kj": tuple(Kj)})
    return A, B


def phi_vector(cover: CliqueCover, ell: int) -> PhiVector:
    if cover.order() != ell:
        raise PreconditionError(f"cover spans {cover.order()} vertices, expected {ell}")
    phi = PhiVector.from_counts(cover.k, {i: len(cover.families[i]) for i in range(1, cover.k + 1)}, ell)
    if not phi.is_normalised():
        raise LemmaViolation("weighted proportions do not sum to 1")
    return phi


# ----------------------------------------------------------------- audit


@dataclass
class AuditReport:
    certified: bool
    checks: dict[str, bool] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def fail(self, name: str, **witness) -> None:
        self.checks[name] = False
        self.failures.append({"check": name, **witness})

    def as_dict(self) -> dict:
        return {"certified": self.certified, "passed": self.passed, "checks": dict(self.checks),
                "failures": self.failures, "notes": self.notes}


def _partite_by_missed(G: Graph, K1: Sequence[int], A_sets: list[tuple[int, ...]]) -> bool:
    """Colour each A-vertex by the vertex of K1 it misses; classes must be independent and full."""
    m1 = mask_of(K1)
    classes: dict[int, int] = {x: 0 for x in K1}
    for A in A_sets:
        used = 0
        for v in A:
            missed = m1 & ~G.rows[v]
            if missed.bit_count() != 1:
                return False
            if missed & used:
                return False
            used |= missed
            classes[lowest(missed)] |= 1 << v
    return all(G.is_independent(c) and c.bit_count() == len(A_sets) for c in classes.values())


def _partite_exists(G: Graph, vertices: Sequence[int], parts: int, size: int, cap: int = 24) -> bool | None:
    """Is there a partition of ``vertices`` into ``parts`` independent sets of ``size`` each?"""
    if len(vertices) != parts * size:
        return False
    if len(vertices) > cap:
        return None
    rows = G.rows

    def rec(mask: int) -> bool:
        if not mask:
            return True
        v = lowest(mask)
        free = [u for u in iter_bits(mask & ~rows[v] & ~(1 << v))]
        for extra in combinations(free, size - 1):
            cls = mask_of((v,) + extra)
            if G.is_independent(cls) and rec(mask & ~cls):
                return True
        return False

    return rec(mask_of(vertices))


def _hall_ok(G: Graph, K: Sequence[int], Kp: Sequence[int]) -> bool:
    return not isinstance(complement_perfect_matching(G, K, Kp), HallViolator)


def audit_cover(G: Graph, cover: CliqueCover, gamma=None, d=0, eps=0) -> AuditReport:
    """Check the structural facts that lexicographic maximality forces.

    ``partition``, ``edge_bound`` (pairs of orders i <= j < k), ``k_clique_bound``,
    ``ab_split`` and ``partite`` (pairs in Phi_i against Phi_j, j < k), ``matching``
    (complement perfect matchings inside each Phi_i, i < k) and, when ``gamma``
    is given and the Ore-type bound holds, ``edge_lower_bound``.
    Checks on an uncertified cover are advisory.
    """
    k = cover.k
    rep = AuditReport(cover.certified)
    bad = cover.violations(G)
    rep.checks["partition"] = not bad
    if bad:
        rep.failures.append({"check": "partition", "problems": bad})
        return rep
    fam = cover.families
    masks = {c: mask_of(c) for c in cover.cliques()}

    rep.checks["edge_bound"] = True
    for i in range(1, k):
        for j in range(i, k):
            for Ki in fam[i]:
                for Kj in fam[j]:
                    if Ki == Kj:
                        continue
                    e = G.edges_between(masks[Ki], masks[Kj])
                    if e > i * (j - 1):
                        rep.fail("edge_bound", Ki=Ki, Kj=Kj, edges=e)
                    elif e == i * (j - 1) and classify_connection(G, Ki, Kj).kind is not Connection.WELL:
                        rep.fail("edge_bound", Ki=Ki, Kj=Kj, edges=e, reason="tight but not well connected")

    rep.checks["k_clique_bound"] = True
    for Kk in fam[k]:
        for i in range(1, k):
            if len(fam[i]) < k:
                continue
            top = sorted((G.edges_between(masks[c], masks[Kk]) for c in fam[i]), reverse=True)[:k]
            if sum(top) > i * k * (k - 1):
                rep.fail("k_clique_bound", Kk=Kk, i=i, edges=sum(top))

    rep.checks["ab_split"] = True
    rep.checks["partite"] = True
    top_level = {"pairs": 0, "partite": 0, "split_fail": 0}
    for i in range(1, k):
        for K1, K2 in combinations(fam[i], 2):
            a_sets: dict[int, list] = {}
            for j in range(i, k + 1):
                for Kj in fam[j]:
                    if Kj in (K1, K2):
                        continue
                    t = i * (j - 1)
                    if G.edges_between(masks[K1], masks[Kj]) != t or G.edges_between(masks[K2], masks[Kj]) != t:
                        continue
                    try:
                        A, _ = ab_partition(G, K1, K2, Kj)
                    except LemmaViolation as exc:
                        if j < k:
                            rep.fail("ab_split", K1=K1, K2=K2, Kj=Kj, witness=str(exc))
                        else:
                            top_level["split_fail"] += 1
                        continue
                    a_sets.setdefault(j, []).append(A)
            for j, sets in a_sets.items():
                if j == k:
                    continue
                if not _partite_by_missed(G, K1, sets):
                    verts = [v for A in sets for v in A]
                    if _partite_exists(G, verts, i, len(sets)) is False:
                        rep.fail("partite", K1=K1, K2=K2, j=j, A=sets)
            below = [A for j in sorted(a_sets) if j < k for A in a_sets[j]]
            if k in a_sets:
                top_level["pairs"] += 1
                if _partite_by_missed(G, K1, below + a_sets[k]):
                    top_level["partite"] += 1
    rep.notes["with_top_level"] = top_level

    rep.checks["matching"] = True
    for i in range(1, k):
        for K, Kp in combinations(fam[i], 2):
            if not _hall_ok(G, K, Kp):
                rep.fail("matching", K=K, Kp=Kp)

    if gamma is not None:
        gamma, d, eps = Fraction(gamma), Fraction(d), Fraction(eps)
        ell = G.n
        factor = 1 - Fraction(1, k - 1) + gamma - d - 2 * eps
        low, _ = ore_min_sum(G)
        if low >= 2 * factor * ell:
            rep.checks["edge_lower_bound"] = True
            deg = G.degrees()
            for i in range(1, k):
                vals = sorted(sum(deg[v] for v in c) for c in fam[i])
                acc = 0
                for p, val in enumerate(vals, start=1):
                    acc += val
                    if p >= 2 and acc < p * i * factor * ell:
                        rep.fail("edge_lower_bound", i=i, p=p, edges=acc)
                        break
        else:
            rep.notes["edge_lower_bound"] = "skipped: Ore-type hypothesis fails"
    return rep
