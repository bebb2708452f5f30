"""Transfer digraph between clusters, sink sets, and routing of surplus vertices.

An arc (U, U1) says that one vertex of U can stand in for a vertex of U1 in
the factor element containing U1, because U is adjacent to every other
cluster of that element. Surplus vertices travel along arcs until they reach
a sink cluster.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import PreconditionError
from .graphs import Digraph, Graph, iter_bits, mask_of

F = Fraction


@dataclass
class TransferDigraph:
    D: Digraph
    factor: list[tuple[int, ...]]
    element_of: dict[int, int]
    provenance: dict[tuple[int, int], tuple[int, tuple[tuple[int, int], ...]]] = field(repr=False)

    def verify(self, R: Graph) -> bool:
        for (u, v), (e, wit) in self.provenance.items():
            if self.element_of.get(v) != e:
                return False
            if any(not R.has_edge(a, b) for a, b in wit):
                return False
        return True


def build_digraph(R: Graph, factor: Sequence[Sequence[int]]) -> TransferDigraph:
    """Arc (U, W) whenever W lies in an element whose other members are all adjacent to U."""
    factor = [tuple(t) for t in factor]
    element_of: dict[int, int] = {}
    for e, t in enumerate(factor):
        for x in t:
            if x in element_of:
                raise PreconditionError(f"cluster {x} lies in two factor elements")
            if not 0 <= x < R.n:
                raise PreconditionError(f"cluster {x} out of range")
            element_of[x] = e
    out = [0] * R.n
    prov = {}
    for e, t in enumerate(factor):
        tm = mask_of(t)
        for U in range(R.n):
            seen = R.rows[U] & tm
            missing = tm & ~seen
            if missing.bit_count() > 1:
                continue
            if missing:
                targets = [next(iter_bits(missing))]
            else:
                targets = list(t)
            for W in targets:
                if W == U:
                    continue
                out[U] |= 1 << W
                prov[(U, W)] = (e, tuple((U, x) for x in t if x != W))
    return TransferDigraph(Digraph(R.n, out), factor, element_of, prov)


def source_sets(D: Digraph) -> list[int]:
    """Bit mask of W(v) for every v: all u with a directed path to v, v included."""
    inn = D.inn
    out = []
    for v in range(D.n):
        seen = 1 << v
        frontier = seen
        while frontier:
            nxt = 0
            for x in iter_bits(frontier):
                nxt |= inn[x]
            frontier = nxt & ~seen
            seen |= frontier
        out.append(seen)
    return out


def source_set(D: Digraph, v: int) -> set[int]:
    if not 0 <= v < D.n:
        raise PreconditionError("vertex out of range")
    seen = {v}
    stack = [v]
    inn = D.inn
    while stack:
        x = stack.pop()
        for u in iter_bits(inn[x]):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


@dataclass
class SinkSet:
    sinks: list[int]
    rounds: list[dict]
    delta: int

    def as_dict(self) -> dict:
        return {"sinks": self.sinks, "delta": self.delta, "rounds": self.rounds}


def sink_set_greedy(D: Digraph) -> SinkSet:
    """Pick the vertex with the largest source set, delete that set, repeat.

    No arc enters a deleted source set from outside, so the source sets in
    what remains are the original ones minus the deleted vertices and one
    closure computation suffices.
    """
    W = source_sets(D)
    delta = D.min_out_degree() if D.n else 0
    alive = (1 << D.n) - 1
    sinks, rounds = [], []
    while alive:
        best, pick = -1, -1
        for v in iter_bits(alive):
            size = (W[v] & alive).bit_count()
            if size > best:
                best, pick = size, v
        removed = W[pick] & alive
        if best < delta + 1:
            raise AssertionError(f"round removed {best} < delta+1 = {delta + 1}")
        sinks.append(pick)
        rounds.append({"pick": pick, "removed": best, "remaining": (alive & ~removed).bit_count()})
        alive &= ~removed
    return SinkSet(sinks, rounds, delta)


def covers_by_sources(D: Digraph, sinks: Sequence[int]) -> bool:
    union = set()
    for s in sinks:
        union |= source_set(D, s)
    return union == set(range(D.n))


# ------------------------------------------------------------ degree checks


@dataclass
class OutDegreeCheck:
    cluster: int
    hypothesis: bool
    regime: bool
    measured: int
    bound: Fraction
    detail: dict

    @property
    def passed(self) -> bool | None:
        if not self.hypothesis:
            return None
        return self.measured >= self.bound

    def as_dict(self) -> dict:
        return {"cluster": self.cluster, "hypothesis": self.hypothesis, "regime": self.regime,
                "measured": self.measured, "bound": str(self.bound), "passed": self.passed, **self.detail}


def out_degree_check(T: TransferDigraph, R: Graph, U: int, *, k: int, gamma=None,
                     alpha_p=None, d=0, eps=0, case: str = "general") -> OutDegreeCheck:
    """Compare U's out-degree with the lower bound for high-degree clusters.

    The measured value counts U's own element once, as the definition would
    give the loop (U, U) that the loopless digraph drops. General case: the
    degree hypothesis weighs the last cluster of every element by alpha'.
    """
    d, eps = F(d), F(eps)
    nV = R.n
    measured = T.D.out_degree(U) + (1 if U in T.element_of else 0)
    if case == "general":
        gamma, ap = F(gamma), F(alpha_p)
        weight = {}
        for t in T.factor:
            for x in t[:-1]:
                weight[x] = F(1)
            weight[t[-1]] = ap
        total = sum(weight.values(), F(0))
        deg = sum((weight.get(x, F(0)) for x in iter_bits(R.rows[U])), F(0))
        need = (1 - F(1, k - 1) + gamma - d - 2 * eps) * total
        bound = F((k - 1) ** 2) * gamma / k * nV
        regime = d + 2 * eps <= (k - 1) ** 2 * gamma * gamma
        detail = {"weighted_degree": str(deg), "needed": str(need)}
    elif case == "balanced":
        deg = R.degree(U)
        need = (1 - F(1, k) - d - 2 * eps) * nV
        bound = F(nV, 2 * k)
        regime = k * (d + 2 * eps) <= F(1, 2)
        detail = {"degree": deg, "needed": str(need)}
    else:
        raise PreconditionError(f"unknown case {case!r}")
    covered = len(T.element_of) == nV
    return OutDegreeCheck(U, deg >= need and covered, regime, measured, bound, detail)


def low_degree_clusters(R: Graph, threshold) -> list[int]:
    """Clusters below the degree threshold; an Ore-type bound on R makes them a clique."""
    return [u for u in range(R.n) if R.degree(u) < threshold]


# ---------------------------------------------------------------- planning


@dataclass
class TransferPlan:
    moves: list[tuple[tuple[int, ...], int]]
    residual: dict[int, int]
    unrouted: dict[int, int]

    def total_moved(self) -> int:
        return sum(a for _, a in self.moves)

    def as_dict(self) -> dict:
        return {"moves": [{"path": list(p), "amount": a} for p, a in self.moves],
                "residual": {str(k): v for k, v in sorted(self.residual.items())},
                "unrouted": {str(k): v for k, v in sorted(self.unrouted.items())}}


def _shortest_to_sinks(D: Digraph, start: int, sinks: int, usable) -> list[int] | None:
    prev = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if (sinks >> x) & 1 and x != start:
            path = [x]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for y in iter_bits(D.out[x]):
            if y not in prev and usable(x, y):
                prev[y] = x
                queue.append(y)
    return None


def plan_transfers(D: Digraph, extras: Mapping[int, int], sinks, cap: int | None = None) -> TransferPlan:
    """Route every non-sink surplus to a sink along shortest paths.

    With ``cap`` each arc carries at most that many vertices in total and a
    surplus may be split over several paths. Extras that cannot be routed are
    reported, never dropped.
    """
    smask = mask_of(sinks)
    load: dict[tuple[int, int], int] = {}
    residual = {s: int(extras.get(s, 0)) for s in sorted(set(sinks))}
    unrouted: dict[int, int] = {}
    moves = []

    def usable(x, y):
        return cap is None or load.get((x, y), 0) < cap

    for c in sorted(extras):
        amount = int(extras[c])
        if amount < 0:
            raise PreconditionError("extras must be nonnegative")
        if amount == 0 or (smask >> c) & 1:
            continue
        while amount:
            path = _shortest_to_sinks(D, c, smask, usable)
            if path is None:
                unrouted[c] = amount
                break
            room = amount if cap is None else min(cap - load.get(a, 0) for a in zip(path, path[1:]))
            push = min(amount, room)
            for a in zip(path, path[1:]):
                load[a] = load.get(a, 0) + push
            moves.append((tuple(path), push))
            residual[path[-1]] += push
            amount -= push
    return TransferPlan(moves, residual, unrouted)
