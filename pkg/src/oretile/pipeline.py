"""Desk-scale tiling pipeline on blow-up instances.

The flow: decompose the reduced graph into factor elements, insert the
exceptional vertices one H-copy at a time (Phase I), move surplus vertices
along the transfer digraph to a few sink clusters, then tile every element.
Exact search replaces the embedding lemma once an element's residue is small.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bounds import element_leftover_bound, leftover_constant, s_param
from .chromatic import BottleSpec, bottle_search, bottle_spec_of
from .cover import maximal_clique_cover
from .decomposition import run_balanced_decomposition, run_decomposition, system_from_cover
from .errors import LemmaViolation, PreconditionError
from .graphs import Graph, iter_bits, mask_of
from .regularity import ClusterMap
from .tiling import class_layout, embed_in_clusters, max_tiling, verify_copy
from .transfer import build_digraph, out_degree_check, plan_transfers, sink_set_greedy

F = Fraction
EXACT_RESIDUE = 60


@dataclass
class PipelineConfig:
    H: Graph
    seed: int = 0
    d: Fraction = F(1, 1000)
    eps: Fraction = F(1, 10000)
    mu: Fraction = F(1, 10)
    theta: Fraction = F(1, 1000)          # theta_1 = sqrt(theta) is only ever compared squared
    alpha_prime: Fraction | None = None   # None: alpha + alpha(1-alpha)mu/k^2
    exact_residue: int = EXACT_RESIDUE
    budget: int = 200_000
    retries: int = 30
    attempts: int = 200                   # restarts on the residue of each element
    extremal: bool = False                # rebalance with stars when s < mu instead of failing

    def __post_init__(self):
        for name in ("d", "eps", "mu", "theta"):
            setattr(self, name, F(getattr(self, name)))
        if self.alpha_prime is not None:
            self.alpha_prime = F(self.alpha_prime)
        if not 0 < self.theta < 1:
            raise PreconditionError("theta must lie in (0, 1)")


@dataclass
class Unit:
    """What gets embedded: H itself when it is a bottle graph, otherwise its bottle with a stored H-factor."""

    spec: BottleSpec
    graph: Graph
    split: list[tuple[int, ...]] | None

    @classmethod
    def of(cls, H: Graph) -> "Unit":
        spec = bottle_spec_of(H)
        if spec is not None:
            return cls(spec, H, None)
        res = bottle_search(H)
        return cls(res.spec, res.graph, res.factor)

    def h_copies(self, img: Sequence[int]) -> list[tuple[int, ...]]:
        if self.split is None:
            return [tuple(img)]
        return [tuple(img[x] for x in c) for c in self.split]


@dataclass
class Element:
    """One factor element: cluster pools, the last one being the small cluster."""

    index: int
    origin: tuple[int, ...]               # cluster of the reduced graph behind each pool
    pools: list[set[int]]
    selected: int = 0

    @property
    def k(self) -> int:
        return len(self.pools)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.pools)

    def lists(self) -> list[list[int]]:
        return [sorted(p) for p in self.pools]


@dataclass
class TilingState:
    G: Graph
    unit: Unit
    elements: list[Element]
    L1: int
    V0: list[int]
    copies: list[tuple[int, ...]] = field(default_factory=list)      # unit copies, as host tuples
    uncovered_exceptional: list[int] = field(default_factory=list)
    log: dict = field(default_factory=dict)
    calls: int = 0

    def next_seed(self, base: int) -> int:
        self.calls += 1
        return base * 1_000_003 + self.calls

    def remove(self, vertices) -> None:
        vs = set(vertices)
        for e in self.elements:
            for p in e.pools:
                p -= vs


# ------------------------------------------------------------- decomposition


def build_elements(G: Graph, cmap: ClusterMap, k: int, unit: Unit, config: PipelineConfig) -> tuple[list[Element], int, dict]:
    """Factor elements of the blow-up, balanced or of profile (L1, ..., L1, a'L1)."""
    R = cmap.reduced
    L = len(cmap.clusters[0])
    if any(len(c) != L for c in cmap.clusters):
        raise PreconditionError("clusters must have equal size")
    if unit.spec.balanced:
        dec = run_balanced_decomposition(R, L, config.d, config.eps, k)
        elements = [Element(i, tuple(t), [set(cmap.clusters[c]) for c in t]) for i, t in enumerate(dec.tiles)]
        return elements, L, {"kind": "balanced", **dec.as_dict()}
    cover = maximal_clique_cover(R, k, "exact" if R.n <= 12 else "heuristic")
    system = system_from_cover(R, cover, L, concrete=True)
    phi = system.phi()
    s = s_param(phi, k, unit.spec.gamma)
    if s < config.mu and config.extremal:
        elements = [Element(i, tuple(c), [set(cmap.clusters[x]) for x in c]) for i, c in enumerate(cover.cliques())
                    if len(c) == k]
        for i, e in enumerate(elements):
            e.index = i
        return elements, L, {"kind": "extremal", "s": str(s), "phi": [str(phi[i]) for i in range(1, k + 1)]}
    cert = run_decomposition(system, unit.spec.alpha, k, config.mu, L, alpha_prime=config.alpha_prime)
    elements = []
    for g in cert.tiles:
        for ivs in g.parts:
            pools = [set(cmap.clusters[cl][st:st + sz]) for cl, st, sz in ivs]
            elements.append(Element(len(elements), tuple(cl for cl, _, _ in ivs), pools))
    info = {"kind": "general", "L1": cert.L1, "alpha_prime": str(cert.alpha_prime), "residue": cert.residue,
            "tiles": cert.tile_count}
    return elements, cert.L1, info


# ------------------------------------------------------------------ phase I


def _class_slot(position: int, small_position: int, k: int) -> int:
    slots = [small_position] + [p for p in range(k) if p != small_position]
    return slots.index(position)


def _insert_one(state: TilingState, v: int, config: PipelineConfig, general: bool) -> dict:
    G, spec = state.G, state.unit.spec
    k = spec.k
    d = config.d
    nE = len(state.elements)
    cap_sq = config.theta * state.L1 * state.L1
    satisfying, available = [], []
    for e in state.elements:
        ok = [G.degree_into(v, mask_of(p)) >= d * len(p) for p in e.pools]
        good = sum(ok) >= k - 1
        if good:
            satisfying.append((e, ok))
            if e.selected * e.selected < cap_sq:
                available.append((e, ok))
    row = {"vertex": v, "satisfying": str(F(len(satisfying), nE)),
           "available": str(F(len(available), nE)),
           "unavailable": str(F(sum(1 for e in state.elements if e.selected * e.selected >= cap_sq), nE))}
    for e, ok in available:
        if general:
            if all(ok[:-1]):
                position, small = k - 1, k - 1
            else:
                position, small = ok.index(False), k - 1
        else:
            position = ok.index(False) if not all(ok) else 0
            small = 0
        classes = class_layout(state.unit.graph)
        x = classes[_class_slot(position, small, k)][0]
        img = embed_in_clusters(G, e.lists(), state.unit.graph, small, seed=state.next_seed(config.seed),
                                retries=config.retries, fixed={x: v}, check_sizes=False)
        if img is None:
            continue
        e.selected += 1
        state.remove(img)
        state.copies.append(tuple(img))
        row.update({"element": e.index, "position": position})
        return row
    raise LemmaViolation("no available element takes the exceptional vertex", witness={"state": row})


def phase1_insert(state: TilingState, config: PipelineConfig) -> dict:
    """Cover the exceptional vertices, then push out cluster vertices with too few neighbours."""
    G, spec = state.G, state.unit.spec
    k, n = spec.k, G.n
    general = not spec.balanced
    low = (1 - F(1, k - 1) + spec.gamma) * n if general else (1 - F(1, k)) * n
    need = F(spec.alpha, 2) if general else F(1, 3)
    steps, low_set = [], []
    queue = list(state.V0)
    rounds = 0
    while queue:
        rounds += 1
        for v in queue:
            if G.degree(v) < low:
                low_set.append(v)
            else:
                row = _insert_one(state, v, config, general)
                row["passed"] = F(row["satisfying"]) >= need
                steps.append(row)
        queue = []
        threshold = config.d - config.eps
        for e in state.elements:
            masks = [mask_of(p) for p in e.pools]
            for i, p in enumerate(e.pools):
                drop = [v for v in sorted(p)
                        if any(G.degree_into(v, masks[j]) < threshold * len(e.pools[j]) for j in range(k) if j != i)]
                for v in drop:
                    p.discard(v)
                queue += drop
        if rounds > 5 and queue:
            raise LemmaViolation("super-regular cleanup keeps producing exceptional vertices")
    low_res = None
    if low_set:
        res = max_tiling(G, state.unit.graph, config.budget, within=mask_of(low_set))
        state.copies += res.copies
        state.remove(v for c in res.copies for v in c)
        state.uncovered_exceptional = list(res.leftover)
        low_res = {"size": len(low_set), "clique": G.is_clique(mask_of(low_set)), "uncovered": len(res.leftover)}
    # ceil(theta_1 L1): least c with c^2 >= theta L1^2
    target = config.theta * state.L1 * state.L1
    cap = math.isqrt(math.floor(target))
    while cap * cap < target:
        cap += 1
    report = {
        "inserted": len(steps), "low_degree": low_res, "steps": steps,
        "availability_bound": str(need),
        "min_satisfying": min((row["satisfying"] for row in steps), key=F, default=None),
        "max_selected": max((e.selected for e in state.elements), default=0),
        "cap": cap,
        "max_unavailable": max((row["unavailable"] for row in steps), key=F, default="0"),
    }
    # unavailable fraction u must satisfy u <= k sqrt(theta), compared squared
    report["unavailable_ok"] = F(report["max_unavailable"]) ** 2 <= k * k * config.theta
    report["cap_ok"] = report["max_selected"] <= cap
    report["all_passed"] = all(row["passed"] for row in steps) and report["unavailable_ok"] and report["cap_ok"]
    state.log["phase1"] = report
    return report


# ----------------------------------------------------------------- phase II


def profile_plan(sizes: Sequence[int], sigma: int, omega: int) -> tuple[int, list[int]]:
    """Most copies of K(sigma, omega, ..., omega) that fit, with x[i] copies putting sigma in cluster i.

    Among the best counts the leftover (a_i) minimising sum |a_i - omega| is chosen.
    """
    k = len(sizes)
    if sigma == omega:
        T = min(a // omega for a in sizes)
        return T, [T] + [0] * (k - 1)
    gap = omega - sigma
    T = sum(sizes) // (sigma + (k - 1) * omega)
    while T > 0:
        low = [max(0, -((a - omega * T) // gap)) for a in sizes]
        if sum(low) <= T and all(x <= T for x in low):
            break
        T -= 1
    if T == 0:
        return 0, [0] * k
    x = list(low)
    for _ in range(T - sum(low)):
        best = None
        for i in range(k):
            if x[i] + 1 > T:
                continue
            trial = x[:]
            trial[i] += 1
            cost = sum(abs(a - omega * T + gap * xi - omega) for a, xi in zip(sizes, trial))
            if best is None or cost < best[0]:
                best = (cost, i)
        x[best[1]] += 1
    return T, x


def plan_leftover(sizes: Sequence[int], sigma: int, omega: int, T: int, x: Sequence[int]) -> list[int]:
    return [a - (omega * T - (omega - sigma) * xi) for a, xi in zip(sizes, x)]


def _orientation_sequence(x: Sequence[int]) -> list[int]:
    total = sum(x)
    seq, done = [], [0] * len(x)
    for step in range(1, total + 1):
        i = max(range(len(x)), key=lambda j: (F(x[j] * step, total) - done[j], -j))
        seq.append(i)
        done[i] += 1
    return seq


def _residual_search(G: Graph, unit: Unit, pools: list[set[int]], seed: int, attempts: int) -> tuple[list, int]:
    """Repeated randomised completions of a small residue, each following a fresh profile plan."""
    sigma, omega = unit.spec.sigma, unit.spec.omega
    T, x = profile_plan([len(p) for p in pools], sigma, omega)
    rng = random.Random(seed)
    best: list = []
    for _ in range(attempts):
        local = [set(p) for p in pools]
        todo = _orientation_sequence(x)
        rng.shuffle(todo)
        got = []
        for o in todo:
            img = embed_in_clusters(G, [sorted(p) for p in local], unit.graph, o, seed=rng.randrange(1 << 30),
                                    retries=3, check_sizes=False)
            if img is None:
                continue
            for p in local:
                p.difference_update(img)
            got.append(tuple(img))
        if len(got) > len(best):
            best = got
        if len(best) >= T:
            break
    return best, T


def tile_element(state: TilingState, e: Element, config: PipelineConfig) -> dict:
    """Greedy embeddings following the profile plan; the last few dozen vertices get repeated restarts."""
    G, unit = state.G, state.unit
    sigma, omega = unit.spec.sigma, unit.spec.omega
    sizes = e.sizes()
    T, x = profile_plan(sizes, sigma, omega)
    h = unit.graph.n
    made = 0
    for o in _orientation_sequence(x):
        if sum(len(p) for p in e.pools) <= config.exact_residue:
            break
        img = embed_in_clusters(G, e.lists(), unit.graph, o, seed=state.next_seed(config.seed),
                                retries=config.retries, check_sizes=False)
        if img is None:
            break
        for p in e.pools:
            p.difference_update(img)
        state.copies.append(tuple(img))
        made += 1
    residue = sum(len(p) for p in e.pools)
    got, target = _residual_search(G, unit, e.pools, state.next_seed(config.seed), config.attempts)
    for c in got:
        for p in e.pools:
            p.difference_update(c)
    state.copies += got
    made += len(got)
    search = {"residue": residue, "target": target, "copies": len(got)}
    rest = mask_of(v for p in e.pools for v in p)
    if len(got) < target and rest.bit_count() <= 4 * h:
        res = max_tiling(G, unit.graph, config.budget, within=rest)
        for c in res.copies:
            for p in e.pools:
                p.difference_update(c)
        state.copies += res.copies
        made += res.count
        search["exact"] = {"copies": res.count, "optimal": res.optimal}
    left = sum(len(p) for p in e.pools)
    planned_left = sum(plan_leftover(sizes, sigma, omega, T, x))
    return {"element": e.index, "sizes": list(sizes), "planned": T, "made": made,
            "planned_leftover": planned_left, "leftover": left, "residual_search": search,
            "element_bound": element_leftover_bound(unit.spec)}


def _parts_graph(state: TilingState, R: Graph) -> tuple[Graph, list[tuple[int, ...]], list[tuple[int, int]]]:
    nodes = [(e.index, i) for e in state.elements for i in range(e.k)]
    index = {nd: j for j, nd in enumerate(nodes)}
    origin = [state.elements[a].origin[i] for a, i in nodes]
    edges = [(u, v) for u in range(len(nodes)) for v in range(u + 1, len(nodes))
             if origin[u] != origin[v] and R.has_edge(origin[u], origin[v])]
    P = Graph.from_edges(len(nodes), edges)
    factor = [tuple(index[(e.index, i)] for i in range(e.k)) for e in state.elements]
    return P, factor, nodes


def phase2_transfer(state: TilingState, R: Graph, config: PipelineConfig) -> dict:
    """Route plan surpluses to sink clusters, then tile every element."""
    G, spec = state.G, state.unit.spec
    k, sigma, omega = spec.k, spec.sigma, spec.omega
    P, factor, nodes = _parts_graph(state, R)
    T = build_digraph(P, factor)
    extras = {}
    for e in state.elements:
        t, x = profile_plan(e.sizes(), sigma, omega)
        for i, a in enumerate(plan_leftover(e.sizes(), sigma, omega, t, x)):
            extras[factor[e.index][i]] = a
    sinks = sink_set_greedy(T.D)
    plan = plan_transfers(T.D, extras, sinks.sinks)
    pool_of = {factor[e.index][i]: e.pools[i] for e in state.elements for i in range(e.k)}
    moved = 0
    for path, amount in plan.moves:
        for a, b in zip(path, path[1:]):
            eb = state.elements[nodes[b][0]]
            others = [mask_of(p) for j, p in enumerate(eb.pools) if j != nodes[b][1]]
            sizes = [m.bit_count() or 1 for m in others]

            def score(v):
                return (min(F(G.degree_into(v, m), s) for m, s in zip(others, sizes)), -v)

            pick = sorted(pool_of[a], key=score, reverse=True)[:amount]
            if len(pick) < amount:
                raise LemmaViolation("cluster ran dry during a transfer", witness={"arc": (a, b)})
            pool_of[a].difference_update(pick)
            pool_of[b].update(pick)
            moved += len(pick)
    gamma = spec.gamma
    ap = F(state.log.get("decomposition", {}).get("alpha_prime", "1"))
    checks = []
    for u in range(P.n):
        if spec.balanced:
            chk = out_degree_check(T, P, u, k=k, d=config.d, eps=config.eps, case="balanced")
        else:
            chk = out_degree_check(T, P, u, k=k, gamma=gamma, alpha_p=ap, d=config.d, eps=config.eps)
        checks.append(chk)
    if state.log.get("decomposition", {}).get("kind") == "extremal":
        from .extremal import extremal_tile

        rows = [extremal_tile(state, e, config) for e in state.elements]
    else:
        rows = [tile_element(state, e, config) for e in state.elements]
    report = {
        "clusters": P.n, "arcs": T.D.m, "sinks": sinks.sinks,
        "extras_total": sum(extras.values()), "moved": moved, "unrouted": plan.unrouted,
        "out_degree_failures": [c.as_dict() for c in checks if c.passed is False],
        "out_degree_checked": sum(1 for c in checks if c.passed is not None),
        "elements": rows,
    }
    state.log["phase2"] = report
    return report


# --------------------------------------------------------------------- run


@dataclass
class PipelineResult:
    copies: list[tuple[int, ...]]
    leftover: tuple[int, ...]
    bound: int
    report: dict

    @property
    def passed(self) -> bool:
        return len(self.leftover) <= self.bound and self.report["verified"]


def run_pipeline(G: Graph, cmap: ClusterMap, V0: Sequence[int], config: PipelineConfig) -> PipelineResult:
    unit = Unit.of(config.H)
    k = unit.spec.k
    elements, L1, dec = build_elements(G, cmap, k, unit, config)
    pooled = {v for e in elements for p in e.pools for v in p}
    stray = [v for c in cmap.clusters for v in c if v not in pooled]
    dec["stray_vertices"] = len(stray)
    state = TilingState(G, unit, elements, L1, sorted(set(V0) | set(stray)))
    state.log["decomposition"] = dec
    p1 = phase1_insert(state, config)
    p2 = phase2_transfer(state, cmap.reduced, config)
    h_copies = [c for u in state.copies for c in unit.h_copies(u)]
    used = set()
    verified = True
    for c in h_copies:
        if used.intersection(c) or not verify_copy(G, c, config.H):
            verified = False
        used.update(c)
    leftover = tuple(v for v in range(G.n) if v not in used)
    bound = leftover_constant(unit.spec)
    report = {
        "n": G.n, "k": k, "spec": unit.spec.as_dict(), "L1": L1, "decomposition": dec,
        "phase1": p1, "phase2": p2, "copies": len(h_copies), "leftover": len(leftover),
        "bound": bound, "verified": verified,
    }
    return PipelineResult(h_copies, leftover, bound, report)
