"""Rebalancing for near-extremal parts: star relocation plus copy matching.

A part holding too many vertices gives up star centres: each centre is
pinned into a short part, its leaves stay home, and a block from the
remaining parts completes the copy. Stars are matched to blocks by a
bipartite matching over embedding feasibility.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .bounds import element_leftover_bound, extremal_cascade
from .errors import PreconditionError
from .graphs import Graph
from .packing import greedy_star_packing, match_copies
from .tiling import class_layout, embed_in_clusters


@dataclass
class Rebalance:
    moved: int
    rounds: list[dict]
    copies: list[tuple[int, ...]]


def _slots(k: int) -> list[int]:
    # class index -> part position, small class in the last part
    return [k - 1] + list(range(k - 1))


def _plan(pools, spec):
    from .pipeline import plan_leftover, profile_plan

    sizes = [len(p) for p in pools]
    T, x = profile_plan(sizes, spec.sigma, spec.omega)
    return T, plan_leftover(sizes, spec.sigma, spec.omega, T, x)


def rebalance_stars(G: Graph, pools: list[set[int]], unit, seed: int = 0, max_rounds: int = 50) -> Rebalance:
    """Move star centres out of overfull parts until the plan leftover is within the per-element bound."""
    spec = unit.spec
    k, omega = spec.k, spec.omega
    if len(pools) != k:
        raise PreconditionError("need one pool per colour class")
    classes = class_layout(unit.graph)
    slots = _slots(k)
    pos_class = {pos: c for c, pos in enumerate(slots)}
    bound = element_leftover_bound(spec)
    rng = random.Random(seed)
    rounds, copies, moved = [], [], 0
    for _ in range(max_rounds):
        T, left = _plan(pools, spec)
        if sum(left) <= bound:
            break
        i = max(range(k), key=lambda a: (left[a], -a))
        j = min(range(k), key=lambda a: (left[a], a))
        if i == j:
            break
        need = max(1, (left[i] - left[j]) // (unit.graph.n + 1))
        sub = sorted(pools[i])
        pack = greedy_star_packing(G.induced(sub), omega)
        stars = [(sub[c], tuple(sub[x] for x in leaves)) for c, leaves in pack.stars]
        if not stars:
            rounds.append({"from": i, "to": j, "stars": 0, "matched": 0})
            break
        # blocks from the other parts: class sizes, one short in part j where the centre goes
        cls_j = classes[pos_class[j]]
        others = [p for p in range(k) if p != i]
        pools_sorted = {p: sorted(pools[p]) for p in others}
        for p in others:
            rng.shuffle(pools_sorted[p])
        blocks = []
        while len(blocks) < len(stars):
            block = {}
            for p in others:
                size = len(classes[pos_class[p]]) - (1 if p == j else 0)
                start = len(blocks) * size
                chunk = pools_sorted[p][start:start + size]
                if len(chunk) < size:
                    block = None
                    break
                block[p] = chunk
            if block is None:
                break
            blocks.append(block)
        x = cls_j[0]

        def attempt(star, block):
            centre, leaves = star
            clusters = [list(leaves) if p == i else block[p] + ([centre] if p == j else []) for p in range(k)]
            return embed_in_clusters(G, clusters, unit.graph, k - 1, seed=seed, retries=4,
                                     fixed={x: centre}, check_sizes=False)

        m = match_copies(stars, blocks, lambda s, b: attempt(s, b) is not None)
        took = 0
        for a, b in m.pairs[:need]:
            img = attempt(stars[a], blocks[b])
            for p in pools:
                p.difference_update(img)
            copies.append(tuple(img))
            took += 1
        moved += took
        rounds.append({"from": i, "to": j, "stars": len(stars), "blocks": len(blocks),
                       "matched": len(m.pairs), "used": took})
        if not took:
            break
    return Rebalance(moved, rounds, copies)


def extremal_tile(state, element, config, phi=None) -> dict:
    """Rebalance one element's parts, then tile it like any other element."""
    from .pipeline import tile_element

    reb = rebalance_stars(state.G, element.pools, state.unit, seed=config.seed)
    state.copies += reb.copies
    row = tile_element(state, element, config)
    row["rebalance"] = {"moved": reb.moved, "rounds": reb.rounds}
    row["made"] += len(reb.copies)
    if phi is not None:
        spec = state.unit.spec
        try:
            row["cascade"] = extremal_cascade(phi, spec.k, spec.alpha, config.mu, config.eps).as_dict()
        except PreconditionError as exc:
            row["cascade"] = {"skipped": str(exc)}
    return row


def extremal_run(G: Graph, parts: Sequence[Sequence[int]], H: Graph, config) -> dict:
    """Standalone run on a constructed partition; ``parts[-1]`` is the neck side."""
    from .pipeline import Element, TilingState, Unit

    unit = Unit.of(H)
    if len(parts) != unit.spec.k:
        raise PreconditionError(f"expected {unit.spec.k} parts")
    e = Element(0, tuple(range(len(parts))), [set(p) for p in parts])
    state = TilingState(G, unit, [e], max(len(p) for p in parts), [])
    row = extremal_tile(state, e, config)
    used = {v for c in state.copies for v in c}
    row["copies"] = len(state.copies)
    row["uncovered"] = sum(len(p) for p in parts) - len(used)
    return row
