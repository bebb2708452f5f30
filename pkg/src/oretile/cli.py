"""Command line entry point: ``python -m oretile <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .bounds import parameter_table
from .catalog import pattern_from_name
from .chromatic import bottle_search, chi_critical, smallest_color_class
from .cover import audit_cover, maximal_clique_cover
from .decomposition import ClusterSystem, run_decomposition
from .errors import BudgetExhausted, LemmaViolation, PreconditionError
from .graphs import read_digraph, read_graph
from .tiling import greedy_tiling, max_tiling
from .transfer import covers_by_sources, sink_set_greedy

EXIT_OK, EXIT_PRECONDITION, EXIT_BUDGET, EXIT_LEMMA = 0, 2, 3, 4


def _graph_arg(text: str):
    if os.path.exists(text):
        return read_graph(text)
    try:
        return pattern_from_name(text)
    except (KeyError, ValueError):
        raise PreconditionError(f"{text!r} is neither a graph file nor a known pattern name") from None


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


# ---------------------------------------------------------------- commands


def cmd_chromatic(args) -> dict:
    H = _graph_arg(args.graph)
    prof = smallest_color_class(H)
    out = {"n": H.n, "m": H.m, "chi": prof.chi, "sigma": prof.sigma, "chi_cr": str(chi_critical(H))}
    if H.m:
        res = bottle_search(H)
        out["bottle"] = res.spec.as_dict()
        out["bottle_tried"] = [list(t) for t in res.tried]
    return out


def cmd_tile(args) -> dict:
    G, H = _graph_arg(args.graph), _graph_arg(args.pattern)
    if args.greedy:
        res = greedy_tiling(G, H, seed=args.seed)
    else:
        res = max_tiling(G, H, args.budget)
        if not res.optimal:
            raise BudgetExhausted(f"search stopped after {res.nodes_explored} nodes", partial=res.as_dict())
    out = res.as_dict()
    out["count"] = res.count
    return out


def cmd_cover(args) -> dict:
    G = _graph_arg(args.graph)
    mode = "exact" if args.exact else "heuristic"
    cover = maximal_clique_cover(G, args.k, mode, args.budget)
    out = cover.as_dict()
    if args.audit:
        out["audit"] = audit_cover(G, cover).as_dict()
    return out


def cmd_bounds(args) -> dict:
    return parameter_table(args.k, args.sigma, args.omega, args.mu, args.d, args.eps)


def cmd_decompose(args) -> dict:
    system = ClusterSystem.load(args.system)
    cert = run_decomposition(system, args.alpha, system.k, args.mu, args.L,
                             alpha_prime=args.alpha_prime, relaxed=args.relaxed)
    return cert.as_dict()


def cmd_sinkset(args) -> dict:
    D = read_digraph(args.digraph)
    res = sink_set_greedy(D)
    out = res.as_dict()
    out["covers"] = covers_by_sources(D, res.sinks)
    out["bound"] = D.n // (res.delta + 1) if D.n else 0
    return out


def read_keyvalue(path) -> dict:
    """``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise PreconditionError(f"expected key = value, got {line!r}")
            key, value = (x.strip() for x in line.split("=", 1))
            out[key] = value.strip('"')
    return out


def _ints(text: str) -> list[int]:
    text = text.strip().strip("[]")
    if ".." in text:
        lo, rest = text.split("..")
        hi, _, step = rest.partition(":")
        return list(range(int(lo), int(hi) + 1, int(step or 1)))
    return [int(x) for x in text.replace(",", " ").split()]


def cmd_experiment(args) -> dict:
    from .experiments import PIPELINE_CASES, run_pipeline_suite, run_theorem_experiment

    cfg = read_keyvalue(args.config)
    kind = cfg.get("kind", "theorem")
    seed = int(cfg.get("seed", args.seed))
    workers = int(cfg.get("workers", 1))
    if kind == "extremal" or args.extremal:
        return _extremal_experiment(cfg, seed)
    if kind == "theorem":
        kinds = cfg.get("kinds", "ore,SpaceBarrier,NearThreshold").replace(",", " ").split()
        rep = run_theorem_experiment(cfg["pattern"], _ints(cfg["grid"]), int(cfg.get("trials", 3)), seed,
                                     kinds, int(cfg.get("budget", 2_000_000)), workers)
    elif kind == "pipeline":
        cases = PIPELINE_CASES
        if "pattern" in cfg:
            cases = tuple(c for c in PIPELINE_CASES if c[0] == cfg["pattern"])
            if not cases:
                raise PreconditionError(f"no pipeline case for {cfg['pattern']}")
        rep = run_pipeline_suite(_ints(cfg.get("seeds", "0..4")), cases, int(cfg.get("low_degree", 0)), workers)
    else:
        raise PreconditionError(f"unknown experiment kind {kind!r}")
    return rep.as_dict()


def _extremal_experiment(cfg: dict, seed: int) -> dict:
    import numpy as np

    from .extremal import extremal_run
    from .graphs import complete_multipartite, part_ranges
    from .pipeline import PipelineConfig

    H = pattern_from_name(cfg.get("pattern", "K1,2,2"))
    sizes = _ints(cfg["parts"])
    G = complete_multipartite(sizes)
    parts = part_ranges(sizes)
    inner = int(cfg.get("inner_edges", 0))
    if inner:
        rng = np.random.default_rng(seed)
        big = max(range(len(sizes)), key=lambda i: sizes[i])
        pairs = (rng.choice(parts[big], 2, replace=False) for _ in range(inner))
        G = G.with_edges((int(a), int(b)) for a, b in pairs)
    return extremal_run(G, parts, H, PipelineConfig(H, seed=seed))


# ------------------------------------------------------------------ output


def _flat(value):
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, default=str)
    return value


def render(data: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=1, default=str) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        if isinstance(data.get("rows"), list) and data["rows"]:
            cols = sorted({c for r in data["rows"] for c in r})
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in data["rows"]:
                w.writerow({c: _flat(r.get(c, "")) for c in cols})
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for key in sorted(data):
                w.writerow([key, _flat(data[key])])
        return buf.getvalue()
    return "".join(f"{key}: {_flat(data[key])}\n" for key in sorted(data))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand from resetting flags given before it
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="oretile", parents=[common],
                                description="Tilings under Ore-type conditions, with checkable certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("chromatic", parents=[common], help="chi, sigma, chi_cr and the bottle graph")
    s.add_argument("graph", help="edge-list file or pattern name such as K1,2,2")
    s.set_defaults(func=cmd_chromatic)

    s = sub.add_parser("tile", parents=[common], help="maximum H-tiling")
    s.add_argument("graph")
    s.add_argument("--pattern", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=True)
    g.add_argument("--greedy", action="store_true")
    s.add_argument("--budget", type=int, default=1_000_000)
    s.set_defaults(func=cmd_tile)

    s = sub.add_parser("cover", parents=[common], help="lexicographically maximal k-clique cover")
    s.add_argument("graph")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--audit", action="store_true")
    s.add_argument("--budget", type=int, default=5_000_000)
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("bounds", parents=[common], help="derived constants for one parameter choice")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--sigma", type=int, required=True)
    s.add_argument("--omega", type=int, required=True)
    s.add_argument("--mu", type=_frac, required=True)
    s.add_argument("--d", type=_frac, required=True)
    s.add_argument("--eps", type=_frac, required=True)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("decompose", parents=[common], help="run the decomposition on a cluster-system JSON file")
    s.add_argument("system")
    s.add_argument("--alpha", type=_frac, required=True)
    s.add_argument("--mu", type=_frac, required=True)
    s.add_argument("-L", type=int, required=True)
    s.add_argument("--alpha-prime", type=_frac)
    s.add_argument("--relaxed", action="store_true")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("sinkset", parents=[common], help="greedy sink set of a digraph")
    s.add_argument("digraph")
    s.set_defaults(func=cmd_sinkset)

    s = sub.add_parser("experiment", parents=[common], help="run an experiment from a key = value file")
    s.add_argument("config")
    s.add_argument("--extremal", action="store_true", help="use the star-rebalancing components")
    s.set_defaults(func=cmd_experiment)
    return p


GLOBAL_DEFAULTS = {"seed": 0, "format": "json", "out": None}


def parse_args(argv=None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    # filled in here: set_defaults would reach the subcommands through the shared parent actions
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    return args


def main(argv=None) -> int:
    args = parse_args(argv)
    code = EXIT_OK
    try:
        data = args.func(args)
    except PreconditionError as exc:
        data, code = {"error": "precondition", "message": str(exc)}, EXIT_PRECONDITION
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        data, code = {"error": "precondition", "message": str(exc)}, EXIT_PRECONDITION
    except BudgetExhausted as exc:
        data, code = {"error": "budget", "message": str(exc), "partial": exc.partial}, EXIT_BUDGET
    except LemmaViolation as exc:
        data, code = {"error": "lemma", "message": str(exc), "witness": exc.witness}, EXIT_LEMMA
    text = render(data, args.format)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
