"""Term-graph rewriting with local bubbling of non-deterministic choices."""

from .bubbling import BubbleStats, CloneMap, bubble, traverse
from .dominance import (
    DominatorReport,
    chain_meet,
    dominates,
    immediate_dominator,
    initialize,
    validate_attribute,
)
from .evaluator import Computation, EvalConfig, Evaluator, Status, ValueSet, compute_values
from .graph import CHOICE, LEFT, RIGHT, Graph, GraphError, Kind, Symbol, extract_alternative
from .rewrite import Match, Rule, build_contractum, match_rule, rewrite_at

__all__ = [
    "CHOICE",
    "LEFT",
    "RIGHT",
    "BubbleStats",
    "CloneMap",
    "Computation",
    "DominatorReport",
    "EvalConfig",
    "Evaluator",
    "Graph",
    "GraphError",
    "Kind",
    "Match",
    "Rule",
    "Status",
    "Symbol",
    "ValueSet",
    "bubble",
    "build_contractum",
    "chain_meet",
    "compute_values",
    "dominates",
    "extract_alternative",
    "immediate_dominator",
    "initialize",
    "match_rule",
    "rewrite_at",
    "traverse",
    "validate_attribute",
]
