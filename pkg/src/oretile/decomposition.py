"""Cluster systems and their decomposition into unbalanced regular k-cliques.

A cluster system is a family of regular cliques, each a tuple of cluster
sizes. Decomposition slices the k-cliques, spends them to absorb every
smaller clique, and finally cuts everything into copies of one profile
(L1, ..., L1, a'L1). All sizes stay integral; an operation that would
produce a fraction aborts before touching the system.

In concrete mode every clique also carries its parts as ``(cluster, start,
size)`` intervals of original clusters, so tiles can be mapped back to
vertices. Abstract mode tracks sizes only and aggregates identical tiles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .bounds import PhiVector, alpha_prime as alpha_prime_of, round_weight, s_param, typicality_threshold
from .chromatic import gamma_param
from .cover import Connection, CliqueCover, classify_connection
from .errors import LemmaViolation, PreconditionError
from .graphs import Graph, mask_of
from .tiling import kk_tiling_padded, padding_bound

F = Fraction
Interval = tuple[int, int, int]   # (original cluster, start offset, size)


@dataclass
class RegularClique:
    id: int
    sizes: tuple[int, ...]
    provenance: str = "original"
    parent: int | None = None
    typical: bool | None = None
    parts: tuple[Interval, ...] | None = None

    @property
    def order(self) -> int:
        return len(self.sizes)

    @property
    def mass(self) -> int:
        return sum(self.sizes)


@dataclass(frozen=True)
class Link:
    kind: Connection
    B: tuple[int, ...]      # positions of the k-clique adjacent to every cluster of the small clique


@dataclass
class ClusterSystem:
    k: int
    cliques: dict[int, RegularClique]
    links: dict[tuple[int, int], Link] = field(default_factory=dict)   # (small id, k-clique id)
    next_id: int = 0

    def __post_init__(self):
        if self.cliques:
            self.next_id = max(self.next_id, max(self.cliques) + 1)
        for c in self.cliques.values():
            if not 1 <= c.order <= self.k or any(x <= 0 for x in c.sizes):
                raise PreconditionError(f"clique {c.id} has invalid sizes {c.sizes}")

    @property
    def concrete(self) -> bool:
        return all(c.parts is not None for c in self.cliques.values())

    def family(self, order: int) -> list[int]:
        return sorted(i for i, c in self.cliques.items() if c.order == order)

    def mass(self) -> int:
        return sum(c.mass for c in self.cliques.values())

    def reduced_order(self) -> int:
        return sum(c.order for c in self.cliques.values())

    def phi(self) -> PhiVector:
        ell = self.reduced_order()
        return PhiVector.from_counts(self.k, {j: len(self.family(j)) for j in range(1, self.k + 1)}, ell)

    def add(self, sizes, provenance="original", parent=None, parts=None) -> int:
        cid = self.next_id
        self.next_id += 1
        self.cliques[cid] = RegularClique(cid, tuple(sizes), provenance, parent, None, parts)
        return cid

    def link(self, small: int, kclique: int) -> Link | None:
        return self.links.get((small, kclique))

    # --------------------------------------------------------------- I/O

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "cliques": [{"id": c.id, "sizes": list(c.sizes)} for c in sorted(self.cliques.values(), key=lambda c: c.id)],
            "links": [{"small": s, "kclique": t, "kind": l.kind.value, "B": list(l.B)}
                      for (s, t), l in sorted(self.links.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClusterSystem":
        k = int(data["k"])
        cliques = {}
        for c in data["cliques"]:
            cliques[int(c["id"])] = RegularClique(int(c["id"]), tuple(int(x) for x in c["sizes"]))
        links = {}
        for e in data.get("links", []):
            links[(int(e["small"]), int(e["kclique"]))] = Link(Connection(e["kind"]), tuple(int(x) for x in e["B"]))
        sys_ = cls(k, cliques, links)
        for (s, t), l in links.items():
            if s not in cliques or t not in cliques or cliques[t].order != k:
                raise PreconditionError(f"link ({s}, {t}) does not join a small clique to a k-clique")
            if len(set(l.B)) != len(l.B) or any(not 0 <= b < k for b in l.B):
                raise PreconditionError(f"link ({s}, {t}) has bad B positions")
        return sys_

    @classmethod
    def load(cls, path) -> "ClusterSystem":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def system_from_cover(R: Graph, cover: CliqueCover, L: int, concrete: bool = True) -> ClusterSystem:
    """Cluster system of a blow-up: every cover clique of R becomes a regular clique of width L.

    Cluster ids are the vertices of R, so parts map back through ``L * cluster + offset``.
    """
    k = cover.k
    system = ClusterSystem(k, {})
    ids = {}
    for c in cover.cliques():
        parts = tuple((v, 0, L) for v in c) if concrete else None
        ids[c] = system.add([L] * len(c), parts=parts)
    for K in cover.cliques():
        if len(K) == k:
            continue
        kmask = mask_of(K)
        for Kk in cover.families[k]:
            cls_ = classify_connection(R, K, Kk)
            if cls_.kind is Connection.UNDER:
                continue
            B = tuple(p for p, v in enumerate(Kk) if R.rows[v] & kmask == kmask)
            system.links[(ids[K], ids[Kk])] = Link(cls_.kind, B)
    return system


# ---------------------------------------------------------- slicing


def s_partition(system: ClusterSystem, clique_id: int, s: int) -> list[int]:
    """Replace a clique by s cliques whose clusters are 1/s of the originals."""
    c = system.cliques[clique_id]
    if s < 1 or any(x % s for x in c.sizes):
        raise PreconditionError(f"sizes {c.sizes} are not divisible by {s}")
    if s == 1:
        return [clique_id]
    del system.cliques[clique_id]
    out = []
    for r in range(s):
        parts = None
        if c.parts is not None:
            parts = tuple((cl, st + r * (sz // s), sz // s) for cl, st, sz in c.parts)
        nid = system.add([x // s for x in c.sizes], "sliced", c.id, parts)
        system.cliques[nid].typical = c.typical
        out.append(nid)
    return out


# ------------------------------------------------------------ tiles


@dataclass
class TileGroup:
    """``count`` copies of the profile (t, ..., t, a' t); ``parts`` lists each copy when concrete."""

    width: int
    count: int
    origin: str
    parts: list[tuple[Interval, ...]] | None = None

    def profile(self, p: int, q: int, k: int) -> tuple[int, ...]:
        return (self.width,) * (k - 1) + (self.width * p // q,)


def _tile_mass(width: int, p: int, q: int, k: int) -> int:
    return (k - 1) * width + width * p // q


class _Cursor:
    """Hands out consecutive intervals of one part."""

    def __init__(self, part: Interval | None):
        self.part = part
        self.used = 0

    def take(self, size: int) -> Interval | None:
        if self.part is None:
            self.used += size
            return None
        cl, st, sz = self.part
        if self.used + size > sz:
            raise LemmaViolation("interval overdrawn")
        iv = (cl, st + self.used, size)
        self.used += size
        return iv


@dataclass
class Elimination:
    clique: int
    level: int                  # i, the small clique has order k - i
    mode: str                   # typical | atypical
    rounds: int
    consumed: list[int]
    t1: int
    t2: int
    per_round: int
    availability: int           # size of the clique's pool, in parent k-cliques
    slack: Fraction             # measured lambda_i minus the demand up to level i

    def as_dict(self) -> dict:
        return {"clique": self.clique, "level": self.level, "mode": self.mode, "rounds": self.rounds,
                "consumed": len(self.consumed), "t1": self.t1, "t2": self.t2, "per_round": self.per_round,
                "availability": self.availability, "slack": str(self.slack)}


@dataclass
class DecompositionCertificate:
    k: int
    p: int
    q: int
    L: int
    L1: int
    tiles: list[TileGroup]
    eliminations: list[Elimination]
    ledger: list[dict]
    exceptional: list[int]
    exceptional_mass: int
    initial_mass: int
    realized_c: Fraction

    @property
    def alpha_prime(self) -> Fraction:
        return F(self.p, self.q)

    @property
    def tile_count(self) -> int:
        return sum(g.count for g in self.tiles)

    @property
    def residue(self) -> int:
        out = sum(g.count * _tile_mass(g.width, self.p, self.q, self.k) for g in self.tiles)
        return self.initial_mass - out - self.exceptional_mass

    def uniform(self) -> bool:
        return all(g.width == self.L1 for g in self.tiles)

    def as_dict(self) -> dict:
        agg: dict[tuple[int, str], int] = {}
        for g in self.tiles:
            agg[(g.width, g.origin)] = agg.get((g.width, g.origin), 0) + g.count
        return {
            "k": self.k, "alpha_prime": str(self.alpha_prime), "L": self.L, "L1": self.L1,
            "realized_c": str(self.realized_c), "residue": self.residue, "uniform": self.uniform(),
            "tile_count": self.tile_count,
            "tiles": [{"width": w, "origin": o, "count": c} for (w, o), c in sorted(agg.items())],
            "eliminations": [e.as_dict() for e in self.eliminations],
            "exceptional": self.exceptional, "exceptional_mass": self.exceptional_mass,
            "ledger": self.ledger,
        }


# ------------------------------------------------------ divisibility


def divisor_set(k: int, p: int, q: int, levels: Iterable[int] | None = None) -> list[int]:
    """Integers that must divide L so every size in the algorithm is a whole multiple of q where needed."""
    levels = range(1, k) if levels is None else levels
    out = {(q - p) * ((k - 1) * q + p), (q - p) * q}
    for i in levels:
        out.add((q - p) * i * q)
        out.add(i * q * ((i - 1) * q + p))
    return sorted(out)


def minimal_L(k: int, p: int, q: int, levels: Iterable[int] | None = None) -> int:
    return math.lcm(*divisor_set(k, p, q, levels))


# -------------------------------------------------------- elimination


def _resolve_alpha_prime(alpha, k, mu, override) -> tuple[int, int]:
    if override is not None:
        a = F(override)
        if not F(alpha) <= a < 1:
            raise PreconditionError("alpha' must lie in [alpha, 1)")
        return a.numerator, a.denominator
    ap = alpha_prime_of(alpha, k, mu)
    return ap.p, ap.q


def eliminate_clique(system: ClusterSystem, K_id: int, pool: Sequence[int], p: int, q: int,
                     mode: str = "typical", parent_of: dict[int, int] | None = None
                     ) -> tuple[list[TileGroup], dict]:
    """Absorb the small clique ``K_id`` into sliced k-cliques taken from ``pool`` in order.

    Each round spends one k-clique of width L': its B clusters split into a
    large and a small part, giving i tiles of width L'/i and i tiles of width
    L/(i((i-1)q+p)); each cluster of K loses L/((i-1)q+p).
    """
    k = system.k
    K = system.cliques[K_id]
    i = k - K.order
    if not 1 <= i <= k - 1:
        raise PreconditionError("only cliques of order below k are eliminated")
    if len(set(K.sizes)) != 1:
        raise PreconditionError("small clique must have equal clusters")
    L = K.sizes[0]
    rounds = (i - 1) * q + p
    if L % rounds:
        raise PreconditionError(f"L={L} not divisible by (i-1)q+p={rounds}")
    per_round = L // rounds
    if per_round % i:
        raise PreconditionError(f"per-round consumption {per_round} not divisible by i={i}")
    t2 = per_round // i
    if len(pool) < rounds:
        raise LemmaViolation(f"pool of {len(pool)} k-cliques is short of the {rounds} rounds needed",
                             witness={"clique": K_id, "level": i})
    used = list(pool[:rounds])
    widths = {system.cliques[u].sizes for u in used}
    if len(widths) != 1 or len(set(next(iter(widths)))) != 1:
        raise PreconditionError("pool k-cliques must be balanced and of one width")
    Lp = next(iter(widths))[0]
    if Lp % (i * q) or t2 % q:
        raise PreconditionError(f"L'={Lp} or t2={t2} breaks integrality against q={q}")
    t1 = Lp // i
    big = ((i - 1) * q + p) * Lp // (i * q)
    small = Lp - big
    if small != (i - 1) * t2 + t2 * p // q:
        raise LemmaViolation("small part does not match the small-part tiles")

    Bs = []
    for u in used:
        parent = parent_of.get(u, u) if parent_of else u
        link = system.link(K_id, parent)
        if link is None or link.kind is Connection.UNDER:
            raise PreconditionError(f"k-clique {u} is not good for clique {K_id}")
        if mode == "typical" and link.kind is not Connection.WELL:
            raise PreconditionError(f"k-clique {u} is not well connected to typical clique {K_id}")
        if len(link.B) < i:
            raise LemmaViolation(f"only {len(link.B)} clusters of k-clique {parent} see all of clique {K_id}",
                                 witness={"needed": i})
        Bs.append(link.B[:i])

    concrete = system.concrete
    large = TileGroup(t1, 0, f"large-{i}", [] if concrete else None)
    smallg = TileGroup(t2, 0, f"small-{i}", [] if concrete else None)
    kcur = [_Cursor(pt) for pt in (K.parts or [None] * K.order)]
    for u, B in zip(used, Bs):
        Kk = system.cliques[u]
        A = [x for x in range(k) if x not in B]
        cur = {x: _Cursor(Kk.parts[x] if Kk.parts else None) for x in range(k)}
        for r in range(i):
            ivs = [cur[a].take(t1) for a in A]
            ivs += [cur[b].take(t1 * p // q if j == r else t1) for j, b in enumerate(B)]
            large.count += 1
            if concrete:
                large.parts.append(tuple(ivs))
        for r in range(i):
            ivs = [c.take(t2) for c in kcur]
            ivs += [cur[b].take(t2 * p // q if j == r else t2) for j, b in enumerate(B)]
            smallg.count += 1
            if concrete:
                smallg.parts.append(tuple(ivs))
        if any(c.used != Lp for c in cur.values()):
            raise LemmaViolation("k-clique not fully spent in a round")
    if any(c.used != L for c in kcur):
        raise LemmaViolation("small clique not fully consumed")
    for u in used:
        del system.cliques[u]
    del system.cliques[K_id]
    ledger = {"step": 2 if mode == "typical" else 3, "clique": K_id, "level": i, "rounds": rounds,
              "consumed_mass": L * K.order + Lp * k * rounds,
              "produced_mass": large.count * _tile_mass(t1, p, q, k) + smallg.count * _tile_mass(t2, p, q, k)}
    if ledger["consumed_mass"] != ledger["produced_mass"]:
        raise LemmaViolation("mass not conserved in elimination", witness=ledger)
    return [large, smallg], {**ledger, "t1": t1, "t2": t2, "per_round": per_round, "used": used}


def _split_tile(g: TileGroup, L1: int, p: int, q: int) -> TileGroup:
    m = g.width // L1
    if g.parts is None:
        return TileGroup(L1, g.count * m, g.origin)
    out = []
    for ivs in g.parts:
        for r in range(m):
            row = []
            for cl, st, sz in ivs:
                piece = sz // m
                row.append((cl, st + r * piece, piece))
            out.append(tuple(row))
    return TileGroup(L1, g.count * m, g.origin, out)


def _split_balanced(Kk: RegularClique, L1: int, p: int, q: int, k: int) -> TileGroup:
    Lp = Kk.sizes[0]
    groups = Lp * q // (((k - 1) * q + p) * L1)
    count = groups * k
    if Kk.parts is None:
        return TileGroup(L1, count, "balanced")
    cur = [_Cursor(pt) for pt in Kk.parts]
    out = []
    for _ in range(groups):
        for small in range(k):
            order = [x for x in range(k) if x != small] + [small]
            row = [cur[x].take(L1 if x != small else L1 * p // q) for x in order]
            out.append(tuple(row))
    if any(c.used != Lp for c in cur):
        raise LemmaViolation("balanced k-clique not fully spent")
    return TileGroup(L1, count, "balanced", out)


def run_decomposition(system: ClusterSystem, alpha, k: int, mu, L: int, *,
                      alpha_prime=None, c_l=None, relaxed: bool = False,
                      absorb_exceptional: bool = True) -> DecompositionCertificate:
    """Decompose the system into tiles of one profile (L1, ..., L1, a'L1).

    Preconditions (each reported with its slack on failure): s >= mu for the
    system's proportions unless ``relaxed``, and L divisible by the divisor
    set. The first small clique whose pool runs dry is absorbed into the
    exceptional mass; a second one is an error.
    """
    if system.k != k:
        raise PreconditionError("system order differs from k")
    alpha, mu = F(alpha), F(mu)
    gamma = gamma_param(k, alpha)
    phi = system.phi()
    s = s_param(phi, k, gamma)
    if not relaxed and s < mu:
        raise PreconditionError(f"s = {s} is below mu = {mu} (slack {s - mu})")
    for c in system.cliques.values():
        if c.sizes != (L,) * c.order:
            raise PreconditionError(f"clique {c.id} is not uniform of width L={L}")
    p, q = _resolve_alpha_prime(alpha, k, mu, alpha_prime)
    levels = sorted({k - system.cliques[c].order for c in system.cliques if system.cliques[c].order < k})
    bad = [x for x in divisor_set(k, p, q, levels) if L % x]
    if bad:
        raise PreconditionError(f"L={L} is not divisible by {bad}; least valid L is {minimal_L(k, p, q, levels)}")
    ell = system.reduced_order()
    initial = system.mass()
    ct = typicality_threshold(F(p, q), k)
    ledger: list[dict] = []

    # step 1: slice every k-clique into q - p pieces
    parent_of: dict[int, int] = {}
    pieces: dict[int, list[int]] = {}
    for kid in system.family(k):
        new = s_partition(system, kid, q - p)
        pieces[kid] = new
        for x in new:
            parent_of[x] = kid
    Lp = L // (q - p)
    ledger.append({"step": 1, "sliced": len(pieces), "pieces_each": q - p, "L_prime": Lp,
                   "L_prime_over_muL": str(F(Lp) / (mu * L))})

    links = system.links
    smalls = [c for c in system.cliques if system.cliques[c].order < k]
    over_count = {c: sum(1 for (a, b), l in links.items() if a == c and l.kind is Connection.OVER) for c in smalls}
    for c in smalls:
        system.cliques[c].typical = over_count[c] < ct

    weights = {l: round_weight(l, F(p, q)) for l in range(1, k)}
    demand = {i: sum((weights[l] * phi[k - l] for l in range(1, i + 1)), F(0)) for i in range(1, k)}
    touched: set[int] = set()        # parents with at least one consumed piece
    step2_parents: set[int] = set()
    eliminations: list[Elimination] = []
    tiles: list[TileGroup] = []
    exceptional: list[int] = []
    exceptional_mass = 0

    def pool_for(cid: int, kind: Connection, exclusive: bool) -> tuple[list[int], int]:
        parents = sorted(b for (a, b), l in links.items() if a == cid and l.kind is kind)
        out = []
        for par in parents:
            if exclusive and par in touched:
                continue
            out += [x for x in pieces.get(par, []) if x in system.cliques]
        return out, len(parents)

    for step, mode, kind in ((2, "typical", Connection.WELL), (3, "atypical", Connection.OVER)):
        for i in range(1, k):
            for cid in system.family(k - i):
                if cid not in system.cliques or system.cliques[cid].typical != (mode == "typical"):
                    continue
                pool, npar = pool_for(cid, kind, exclusive=(step == 3))
                slack = F(npar, ell) - demand[i]
                try:
                    made, entry = eliminate_clique(system, cid, pool, p, q, mode, parent_of)
                except LemmaViolation as exc:
                    if "pool" not in str(exc) or not absorb_exceptional or exceptional:
                        raise LemmaViolation(f"{exc}; availability slack {slack}",
                                             witness={"clique": cid, "level": i, "slack": str(slack)}) from exc
                    exceptional.append(cid)
                    exceptional_mass += system.cliques[cid].mass
                    del system.cliques[cid]
                    ledger.append({"step": step, "clique": cid, "absorbed": True, "slack": str(slack)})
                    continue
                used = entry.pop("used")
                for u in used:
                    par = parent_of[u]
                    if step == 3 and par in step2_parents:
                        raise LemmaViolation(f"k-clique {par} serves both steps")
                    touched.add(par)
                    if step == 2:
                        step2_parents.add(par)
                tiles += made
                ledger.append(entry)
                eliminations.append(Elimination(cid, i, mode, entry["rounds"], used, entry["t1"], entry["t2"],
                                                entry["per_round"], npar, slack))

    # step 4: one common width
    rest = system.family(k)
    Lbal_num = q * Lp
    Lbal_den = (k - 1) * q + p
    widths = [g.width for g in tiles if g.count]
    if rest:
        if Lbal_num % Lbal_den:
            raise PreconditionError("balanced k-cliques cannot be cut into whole groups")
        widths.append(Lbal_num // Lbal_den)
    if not widths:
        raise PreconditionError("nothing left to decompose")
    if c_l is not None:
        L1 = F(c_l) * L
        if L1.denominator != 1:
            raise PreconditionError(f"c_l * L = {L1} is not an integer")
        L1 = int(L1)
    else:
        L1 = math.gcd(*widths)
    if L1 % q or any(w % L1 for w in widths):
        raise PreconditionError(f"L1={L1} must be a multiple of q={q} dividing every width {sorted(set(widths))}")
    final = [_split_tile(g, L1, p, q) for g in tiles if g.count]
    for kid in rest:
        final.append(_split_balanced(system.cliques[kid], L1, p, q, k))
        del system.cliques[kid]
    ledger.append({"step": 4, "L1": L1, "groups": len(final), "balanced_cliques": len(rest)})
    if system.cliques:
        raise LemmaViolation(f"cliques {sorted(system.cliques)} were never decomposed")
    cert = DecompositionCertificate(k, p, q, L, L1, final, eliminations, ledger, exceptional,
                                    exceptional_mass, initial, F(L1) / (mu * L))
    if cert.residue != 0:
        raise LemmaViolation(f"mass residue {cert.residue}", witness=cert.as_dict())
    return cert


# ------------------------------------------------------ synthetic systems


def feasible_counts(k: int, alpha, mu, p: int, q: int, max_ell: int = 200,
                    require_s: bool = True) -> dict[int, int] | None:
    """Smallest clique counts with s >= mu, some smaller cliques, and room in the pool for all of them.

    With ``require_s=False`` only the pool condition is imposed.
    """
    alpha, mu = F(alpha), F(mu)
    gamma = gamma_param(k, alpha)
    ap = F(p, q)
    best = None
    for ell in range(k + 1, max_ell + 1):
        for a in range(ell // k, 0, -1):
            rest = ell - k * a
            if rest == 0:
                continue
            for order in range(k - 1, 0, -1):
                if rest % order:
                    continue
                counts = {k: a, order: rest // order}
                phi = PhiVector.from_counts(k, counts, ell)
                if require_s and s_param(phi, k, gamma) < mu:
                    continue
                need = sum(round_weight(k - j, ap) * c for j, c in counts.items() if j < k)
                if need < a:
                    best = counts
                    break
            if best:
                return best
    return None


def synthetic_system(k: int, counts: dict[int, int], L: int, seed: int = 0,
                     atypical: int = 0, ct: int | None = None) -> ClusterSystem:
    """Abstract system: every small clique is well connected to every k-clique with random B positions.

    ``atypical`` small cliques additionally own ``ct`` private k-cliques that
    are over connected to them and to nothing else.
    """
    rng = np.random.default_rng(seed)
    system = ClusterSystem(k, {})
    kids = [system.add([L] * k) for _ in range(counts.get(k, 0))]
    smalls = []
    for order in range(k - 1, 0, -1):
        smalls += [system.add([L] * order) for _ in range(counts.get(order, 0))]
    for sid in smalls:
        i = k - system.cliques[sid].order
        for kid in kids:
            B = tuple(sorted(int(x) for x in rng.choice(k, size=i, replace=False)))
            system.links[(sid, kid)] = Link(Connection.WELL, B)
    if atypical:
        if ct is None:
            raise PreconditionError("atypical cliques need the typicality threshold")
        for sid in smalls[:atypical]:
            i = k - system.cliques[sid].order
            for kid in list(system.links):
                if kid[0] == sid:
                    del system.links[kid]
            for _ in range(ct):
                kid = system.add([L] * k)
                B = tuple(sorted(int(x) for x in rng.choice(k, size=min(k, i + 1), replace=False)))
                system.links[(sid, kid)] = Link(Connection.OVER, B)
    return system


# ------------------------------------------------------ balanced variant


@dataclass
class BalancedDecomposition:
    tiles: list[tuple[int, ...]]          # tuples of R-vertices, each a balanced k-clique of width L
    exceptional: tuple[int, ...]
    s: int
    bound: int
    mass: int
    mass_bound: Fraction

    def as_dict(self) -> dict:
        return {"tiles": [list(t) for t in self.tiles], "exceptional": list(self.exceptional),
                "s": self.s, "bound": self.bound, "mass": self.mass, "mass_bound": str(self.mass_bound)}


def run_balanced_decomposition(R: Graph, L: int, d, eps, k: int, budget: int = 2_000_000) -> BalancedDecomposition:
    """K_k-tile the reduced graph with padding s = ceil((d + 2 eps) ell); the rest becomes exceptional."""
    d, eps = F(d), F(eps)
    ell = R.n
    s = math.ceil((d + 2 * eps) * ell)
    res = kk_tiling_padded(R, k, s, budget)
    bound = padding_bound(k, s)
    if len(res.leftover) > bound:
        raise LemmaViolation("too many exceptional clusters", witness={"leftover": res.leftover})
    mass = len(res.leftover) * L
    return BalancedDecomposition(list(res.copies), res.leftover, s, bound, mass, 2 * k * k * d * ell * L)
