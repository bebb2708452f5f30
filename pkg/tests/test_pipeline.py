import itertools
import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oretile import PreconditionError
from oretile.catalog import pattern_from_name
from oretile.experiments import PIPELINE_CASES, gen_blowup_pipeline_instance
from oretile.extremal import extremal_run
from oretile.graphs import complete_multipartite, part_ranges
from oretile.pipeline import PipelineConfig, Unit, plan_leftover, profile_plan, run_pipeline
from oretile.tiling import verify_copy


def brute_plan(sizes, sigma, omega):
    """Largest T, then the smallest sum |leftover - omega|, by enumeration."""
    k, gap = len(sizes), omega - sigma
    for T in range(sum(sizes) // (sigma + (k - 1) * omega), -1, -1):
        costs = []
        for x in itertools.product(range(T + 1), repeat=k):
            if sum(x) != T:
                continue
            left = [a - omega * T + gap * xi for a, xi in zip(sizes, x)]
            if min(left) >= 0:
                costs.append(sum(abs(v - omega) for v in left))
        if costs:
            return T, min(costs)
    return 0, None


@given(st.integers(2, 3), st.integers(2, 3), st.data())
def test_profile_plan_matches_enumeration(k, omega, data):
    sigma = data.draw(st.integers(1, omega - 1))
    sizes = data.draw(st.lists(st.integers(0, 14), min_size=k, max_size=k))
    T, x = profile_plan(sizes, sigma, omega)
    bT, cost = brute_plan(sizes, sigma, omega)
    assert T == bT
    if T:
        left = plan_leftover(sizes, sigma, omega, T, x)
        assert min(left) >= 0 and sum(abs(v - omega) for v in left) == cost


def test_profile_plan_balanced():
    assert profile_plan([7, 9, 8], 2, 2) == (3, [3, 0, 0])
    assert profile_plan([0, 5], 1, 1) == (0, [0, 0])


def test_config_validation():
    H = pattern_from_name("K3")
    assert PipelineConfig(H, theta="1/50").theta == F(1, 50)
    for bad in (0, 1):
        with pytest.raises(PreconditionError):
            PipelineConfig(H, theta=bad)


def test_unit_splits_bottle_into_copies():
    H = pattern_from_name("P4")
    unit = Unit.of(H)
    parts = unit.h_copies(tuple(range(unit.graph.n)))
    assert len(parts) * H.n == unit.graph.n
    assert sorted(v for c in parts for v in c) == list(range(unit.graph.n))
    assert all(verify_copy(unit.graph, c, H) for c in parts)


def _run(name, groups, L, seed, ap, **kw):
    H = pattern_from_name(name)
    k = Unit.of(H).spec.k
    theta = kw.pop("theta", F(1, 1000))
    low = kw.pop("low_degree", 0)
    G, cmap, V0 = gen_blowup_pipeline_instance(k, groups, L, seed, theta=theta, low_degree=low)
    return G, V0, run_pipeline(G, cmap, V0, PipelineConfig(H, seed=seed, alpha_prime=ap, theta=theta, **kw))


@pytest.mark.parametrize("case", PIPELINE_CASES, ids=[c[0] for c in PIPELINE_CASES])
def test_cases_within_bound(case):
    name, groups, L, ap = case
    G, V0, res = _run(name, groups, L, 0, ap)
    assert res.report["verified"] and res.passed
    assert len(res.leftover) <= res.bound
    assert res.report["phase1"]["all_passed"]
    H = pattern_from_name(name)
    used = [v for c in res.copies for v in c]
    assert len(used) == len(set(used)) and len(used) + len(res.leftover) == G.n
    assert all(verify_copy(G, c, H) for c in res.copies)


def test_empty_exceptional_set_is_noop():
    _, V0, res = _run("K2", 3, 200, 1, None, theta=F(1, 10**6))
    assert V0 == []
    p1 = res.report["phase1"]
    assert p1["inserted"] == 0 and p1["steps"] == []


def test_selection_cap_with_larger_theta():
    G, V0, res = _run("K3", 2, 180, 0, None, theta=F(1, 50))
    p1 = res.report["phase1"]
    L1 = res.report["L1"]
    assert p1["cap"] == math.ceil(math.sqrt(1 / 50) * L1)
    assert p1["max_selected"] ** 2 < F(1, 50) * L1 ** 2
    assert p1["cap_ok"] and p1["unavailable_ok"]
    assert all(F(s["satisfying"]) >= F(p1["availability_bound"]) for s in p1["steps"])


def test_low_degree_vertices_are_set_aside():
    _, V0, res = _run("K3", 2, 180, 0, None, theta=F(1, 50), low_degree=3)
    p1 = res.report["phase1"]
    assert p1["low_degree"]["size"] == 3
    assert p1["inserted"] == len(V0) - 3
    assert res.passed


def test_runs_are_deterministic():
    a = _run("K1,2", 4, 160, 3, F(3, 5))[2]
    b = _run("K1,2", 4, 160, 3, F(3, 5))[2]
    assert json.dumps(a.report, sort_keys=True, default=str) == json.dumps(b.report, sort_keys=True, default=str)
    assert a.leftover == b.leftover


def test_extremal_rebalancing():
    import numpy as np

    sizes = [60, 40, 20]
    G = complete_multipartite(sizes)
    parts = part_ranges(sizes)
    rng = np.random.default_rng(0)
    G = G.with_edges((int(a), int(b)) for a, b in (rng.choice(parts[0], 2, replace=False) for _ in range(400)))
    H = pattern_from_name("K1,2,2")
    row = extremal_run(G, parts, H, PipelineConfig(H))
    assert row["rebalance"]["moved"] > 0
    assert row["uncovered"] <= 8
