"""Chromatic invariants of a pattern graph: chi, smallest colour class, chi_cr and bottles."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetExhausted, LemmaViolation, PreconditionError
from .graphs import Graph, complete_multipartite, iter_bits, lowest

COLOR_CAP = 24


def _check_order(H: Graph) -> None:
    if H.n > COLOR_CAP:
        raise PreconditionError(f"pattern order {H.n} above the desk cap of {COLOR_CAP}")


def max_clique_size(H: Graph) -> int:
    best = 0

    def grow(size, cand):
        nonlocal best
        if size > best:
            best = size
        while cand:
            if size + cand.bit_count() <= best:
                return
            v = lowest(cand)
            cand &= cand - 1
            grow(size + 1, cand & H.rows[v])

    grow(0, H.full_mask)
    return best


def _colorable(H: Graph, k: int, budget: list[int]) -> bool:
    """DSATUR backtracking; colours are opened in index order to avoid relabelled repeats."""
    n = H.n
    color = [-1] * n
    nbr_colors = [0] * n
    deg = H.degrees()

    def rec(done: int, used: int) -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExhausted("colouring search ran out of budget")
        if done == n:
            return True
        v = max((x for x in range(n) if color[x] < 0),
                key=lambda x: (nbr_colors[x].bit_count(), deg[x], -x))
        for c in range(min(used + 1, k)):
            if (nbr_colors[v] >> c) & 1:
                continue
            color[v] = c
            changed = []
            for u in iter_bits(H.rows[v]):
                if not (nbr_colors[u] >> c) & 1:
                    nbr_colors[u] |= 1 << c
                    changed.append(u)
            if rec(done + 1, max(used, c + 1)):
                return True
            for u in changed:
                nbr_colors[u] &= ~(1 << c)
            color[v] = -1
        return False

    return rec(0, 0)


@lru_cache(maxsize=512)
def chromatic_number(H: Graph, budget: int = 2_000_000) -> int:
    """Exact chromatic number, searching upward from the clique number."""
    _check_order(H)
    if H.n == 0:
        return 0
    left = [budget]
    k = max(1, max_clique_size(H))
    while not _colorable(H, k, left):
        k += 1
    return k


@dataclass(frozen=True)
class ColoringProfile:
    chi: int
    sigma: int
    optimal_class_size_multisets: tuple[tuple[int, ...], ...]
    witnesses: dict = field(compare=False, hash=False, repr=False)

    def as_dict(self) -> dict:
        return {
            "chi": self.chi,
            "sigma": self.sigma,
            "optimal_class_size_multisets": [list(t) for t in self.optimal_class_size_multisets],
        }


@lru_cache(maxsize=512)
def smallest_color_class(H: Graph, budget: int = 2_000_000) -> ColoringProfile:
    """All class-size multisets over optimal colourings, with one witness colouring each.

    Colourings are enumerated as set partitions: the class of the lowest
    uncoloured vertex is fixed first, and results are memoised on the
    remaining vertex set, which removes relabelled and reordered repeats.
    """
    _check_order(H)
    if H.n == 0:
        raise PreconditionError("pattern graph must have a vertex")
    chi = chromatic_number(H)
    rows = H.rows
    left = [budget]
    memo: dict[tuple[int, int], dict] = {}

    def partitions(mask: int, r: int) -> dict:
        key = (mask, r)
        if key in memo:
            return memo[key]
        left[0] -= 1
        if left[0] < 0:
            raise BudgetExhausted("colouring enumeration ran out of budget")
        out: dict = {}
        if r == 1:
            if mask and all(not (rows[u] & mask) for u in iter_bits(mask)):
                out[(mask.bit_count(),)] = (mask,)
            memo[key] = out
            return out
        if mask.bit_count() < r:
            memo[key] = out
            return out
        v = lowest(mask)
        free = mask & ~rows[v] & ~(1 << v)

        def indep(cur: int, cand: int):
            yield cur
            while cand:
                u = lowest(cand)
                cand &= cand - 1
                yield from indep(cur | (1 << u), cand & ~rows[u])

        for cls in indep(1 << v, free):
            rest = mask & ~cls
            for sizes, wit in partitions(rest, r - 1).items():
                t = tuple(sorted(sizes + (cls.bit_count(),)))
                if t not in out:
                    out[t] = wit + (cls,)
        memo[key] = out
        return out

    found = partitions(H.full_mask, chi)
    if not found:
        raise LemmaViolation("no colouring with chi colours found", witness=H.rows)
    multisets = tuple(sorted(found))
    witnesses = {t: tuple(tuple(iter_bits(c)) for c in found[t]) for t in multisets}
    sigma = min(t[0] for t in multisets)
    return ColoringProfile(chi, sigma, multisets, witnesses)


def chi_critical(H: Graph) -> Fraction:
    """(chi - 1) h / (h - sigma)."""
    if H.m == 0:
        raise PreconditionError("critical chromatic number needs an edge")
    prof = smallest_color_class(H)
    return Fraction((prof.chi - 1) * H.n, H.n - prof.sigma)


def gamma_param(k: int, alpha) -> Fraction:
    alpha = Fraction(alpha)
    if k < 2 or not 0 < alpha <= 1:
        raise PreconditionError("need k >= 2 and 0 < alpha <= 1")
    return alpha / ((k - 1) * (k - 1 + alpha))


def ore_threshold(H: Graph, n: int) -> Fraction:
    return 2 * (1 - 1 / chi_critical(H)) * n


@dataclass(frozen=True)
class BottleSpec:
    k: int
    sigma: int
    omega: int

    def __post_init__(self):
        if self.k < 2 or not 1 <= self.sigma <= self.omega:
            raise PreconditionError("bottle needs k >= 2 and 1 <= sigma <= omega")

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.sigma, self.omega)

    @property
    def chi_cr(self) -> Fraction:
        return self.k - 1 + self.alpha

    @property
    def h(self) -> int:
        return self.sigma + (self.k - 1) * self.omega

    @property
    def gamma(self) -> Fraction:
        return gamma_param(self.k, self.alpha)

    @property
    def balanced(self) -> bool:
        return self.sigma == self.omega

    @property
    def color_vector(self) -> tuple[Fraction, ...]:
        c = self.chi_cr
        return (self.alpha / c,) + (1 / c,) * (self.k - 1)

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.sigma,) + (self.omega,) * (self.k - 1)

    def as_dict(self) -> dict:
        return {
            "k": self.k, "sigma": self.sigma, "omega": self.omega,
            "alpha": str(self.alpha), "chi_cr": str(self.chi_cr), "h": self.h,
            "gamma": str(self.gamma),
            "color_vector": [str(x) for x in self.color_vector],
        }


def bottle_graph(k: int, sigma: int, omega: int) -> Graph:
    BottleSpec(k, sigma, omega)
    return complete_multipartite([sigma] + [omega] * (k - 1))


def bottle_spec_of(H: Graph) -> BottleSpec | None:
    """The spec when H itself is a bottle graph, else ``None``."""
    prof = smallest_color_class(H)
    k = prof.chi
    for sizes in prof.optimal_class_size_multisets:
        s, rest = sizes[0], sizes[1:]
        if len(set(rest)) == 1 and H.m == (H.n * H.n - sum(x * x for x in sizes)) // 2:
            return BottleSpec(k, s, rest[0])
    return None


@dataclass
class BottleSearch:
    spec: BottleSpec
    graph: Graph
    factor: list[tuple[int, ...]]
    candidates: list[BottleSpec]
    tried: list[tuple[int, str]]


def bottle_search(H: Graph, budget: int = 2_000_000) -> BottleSearch:
    """Smallest bottle graph with colour vector (s, t, ..., t), s = sigma/h, holding an H-factor."""
    from .tiling import max_tiling

    if H.m == 0:
        raise PreconditionError("pattern graph must have an edge")
    _check_order(H)
    prof = smallest_color_class(H)
    k, sigma, h = prof.chi, prof.sigma, H.n
    ratio = Fraction(sigma * (k - 1), h - sigma)
    a, b = ratio.numerator, ratio.denominator
    tried = []
    m = 0
    while True:
        m += 1
        order = m * (a + (k - 1) * b)
        if order > (k - 1) * h:
            raise LemmaViolation("no bottle up to order (k-1)h holds an H-factor",
                                 witness={"tried": tried})
        if order % h:
            tried.append((order, "indivisible"))
            continue
        spec = BottleSpec(k, m * a, m * b)
        B = bottle_graph(k, m * a, m * b)
        res = max_tiling(B, H, budget)
        if not res.leftover:
            tried.append((order, "factor"))
            return BottleSearch(spec, B, res.copies, [spec], tried)
        if not res.optimal:
            raise BudgetExhausted(f"factor search on bottle of order {order} ran out of budget")
        tried.append((order, "no factor"))


def bottle_of(H: Graph, budget: int = 2_000_000) -> tuple[BottleSpec, Graph]:
    res = bottle_search(H, budget)
    return res.spec, res.graph
