"""The surface language: a first-order, untyped Curry subset."""

from .program import (
    BUILTINS,
    CHOICE_RULES,
    Branch,
    DefTree,
    Diagnostic,
    Leaf,
    Program,
    check_lois,
    definitional_tree,
    format_term,
    graph_of,
    int_symbol,
    int_value,
    is_value,
    parse_expr,
    parse_program,
    to_graph,
)
from .syntax import LangError, parse_expression, show

__all__ = [
    "BUILTINS",
    "CHOICE_RULES",
    "Branch",
    "DefTree",
    "Diagnostic",
    "LangError",
    "Leaf",
    "Program",
    "check_lois",
    "definitional_tree",
    "format_term",
    "graph_of",
    "int_symbol",
    "int_value",
    "is_value",
    "parse_expr",
    "parse_expression",
    "parse_program",
    "show",
    "to_graph",
]
