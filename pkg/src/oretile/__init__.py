"""Tiling dense graphs under Ore-type degree conditions, at desk scale."""

from .bounds import leftover_constant
from .chromatic import BottleSpec, bottle_of, chi_critical, chromatic_number
from .cover import audit_cover, maximal_clique_cover
from .decomposition import run_decomposition
from .errors import BudgetExhausted, LemmaViolation, PreconditionError
from .graphs import Digraph, Graph, ore_report, parse_graph
from .tiling import max_tiling
from .transfer import sink_set_greedy

__version__ = "0.1.0"

__all__ = [
    "BottleSpec", "BudgetExhausted", "Digraph", "Graph", "LemmaViolation", "PreconditionError",
    "audit_cover", "bottle_of", "chi_critical", "chromatic_number", "leftover_constant",
    "max_tiling", "maximal_clique_cover", "ore_report", "parse_graph", "run_decomposition",
    "sink_set_greedy",
]
