"""Random programs, graphs and dominator attributes for property tests.

Programs are produced as source text so they go through the same parser
and LOIS checks as hand-written ones.  Rule sets are grown from random
definitional trees, which makes them inductively sequential by
construction.
"""

from __future__ import annotations

import os
import random

from .dominance import dominator_sets
from .graph import CHOICE, Graph, Kind, NodeId, Symbol

CONSTRUCTORS = {"A": 0, "B": 0, "S": 1, "P": 2}


def seed_from_env(default: int = 0) -> int:
    """The seed in ``BUBBLY_SEED``, or ``default`` when unset."""
    raw = os.environ.get("BUBBLY_SEED", "").strip()
    return int(raw) if raw else default


# -- programs -----------------------------------------------------------------


def _refine(rng, args, depth):
    """Split a call pattern on random variable positions; yields leaf patterns."""
    holes = [path for path in _holes(args, ())]
    if not holes or depth == 0 or rng.random() < 0.35:
        yield args
        return
    path = rng.choice(holes)
    names = list(CONSTRUCTORS)
    kept = [c for c in names if rng.random() < 0.75] or [rng.choice(names)]
    for con in kept:
        sub = (con, [None] * CONSTRUCTORS[con])
        yield from _refine(rng, _put(args, path, sub), depth - 1)


def _holes(args, prefix):
    for i, a in enumerate(args):
        if a is None:
            yield prefix + (i,)
        else:
            yield from _holes(a[1], prefix + (i,))


def _put(args, path, value):
    args = list(args)
    i = path[0]
    if len(path) == 1:
        args[i] = value
    else:
        con, sub = args[i]
        args[i] = (con, _put(sub, path[1:], value))
    return args


def _show_pattern(p, names):
    if p is None:
        return names.pop(0)
    con, args = p
    if not args:
        return con
    return "(" + " ".join([con, *(_show_pattern(a, names) for a in args)]) + ")"


def _term(rng, ops, vars_, depth, choice_rate):
    leaves = list(vars_) + [c for c, k in CONSTRUCTORS.items() if k == 0]
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(leaves)
    roll = rng.random()
    if roll < choice_rate:
        a = _term(rng, ops, vars_, depth - 1, choice_rate)
        b = _term(rng, ops, vars_, depth - 1, choice_rate)
        return f"({a} ? {b})"
    if roll < 0.55:
        name, arity = rng.choice(sorted(ops.items()))
    else:
        name, arity = rng.choice(sorted(CONSTRUCTORS.items()))
    if arity == 0:
        return name
    args = [_term(rng, ops, vars_, depth - 1, choice_rate) for _ in range(arity)]
    return "(" + " ".join([name, *args]) + ")"


def _rhs(rng, ops, vars_, choice_rate):
    if vars_ and rng.random() < 0.2:
        return rng.choice(vars_)  # collapsing
    if rng.random() < 0.3:
        local = _term(rng, ops, vars_, 2, choice_rate)
        body = _term(rng, ops, [*vars_, "s", "s"], 2, choice_rate)
        if "s" in body.replace("(", " ").replace(")", " ").split():
            return f"{body} where s = {local}"
        return body
    return _term(rng, ops, vars_, 3, choice_rate)


def random_program(rng: random.Random, n_ops: int = 3, choice_rate: float = 0.15) -> str:
    """Source text of a random LOIS program over A, B, S and P."""
    ops = {f"f{i}": rng.randint(1, 2) for i in range(n_ops)}
    lines = ["data T = A | B | S T | P T T", ""]
    for name, arity in ops.items():
        for lhs in _refine(rng, [None] * arity, 2):
            count = sum(1 for _ in _holes(lhs, ()))
            names = [f"x{i}" for i in range(count)]
            shown = [_show_pattern(a, names) for a in lhs]
            vars_ = [f"x{i}" for i in range(count)]
            lines.append(f"{name} {' '.join(shown)} = {_rhs(rng, ops, vars_, choice_rate)}")
    return "\n".join(lines) + "\n"


def random_expression(rng: random.Random, ops: dict[str, int], choice_rate: float = 0.2) -> str:
    """A random top-level expression, sometimes with a shared ``where`` binding."""
    body = _term(rng, ops, ["v", "v"] if rng.random() < 0.5 else [], 3, choice_rate)
    if "v" in body.replace("(", " ").replace(")", " ").split():
        return f"{body} where v = {_term(rng, ops, [], 2, choice_rate)}"
    return body


# -- graphs ---------------------------------------------------------------------

_GRAPH_LABELS = [
    Symbol("A", Kind.CONSTRUCTOR, 0),
    Symbol("B", Kind.CONSTRUCTOR, 0),
    Symbol("S", Kind.CONSTRUCTOR, 1),
    Symbol("P", Kind.CONSTRUCTOR, 2),
    Symbol("f", Kind.OPERATION, 1),
    Symbol("g", Kind.OPERATION, 2),
    Symbol("h", Kind.OPERATION, 3),
]


def random_dag(rng: random.Random, size: int = 20, choice_rate: float = 0.25) -> Graph:
    """A random acyclic graph with sharing and at least one non-root choice.

    Nodes are created bottom-up, each pointing at earlier nodes with a bias
    towards recent ones, then the last node becomes the root and
    unreachable nodes are dropped.  The attribute is left empty.
    """
    while True:
        g = Graph()
        made: list[NodeId] = []
        for k in range(size):
            if k < 2:
                sym = _GRAPH_LABELS[k]
            elif rng.random() < choice_rate:
                sym = CHOICE
            else:
                sym = rng.choice(_GRAPH_LABELS)
            succ = []
            for _ in range(sym.arity):
                lo = max(0, len(made) - 6) if rng.random() < 0.7 else 0
                succ.append(made[rng.randrange(lo, len(made))])
            made.append(g.add_node(sym, succ))
        g.set_root(made[-1])
        g.gc()
        root = g.root
        if any(g.label(n).is_choice and n != root for n in g):
            return g


def random_attribute(rng: random.Random, g: Graph) -> None:
    """Store a random proper dominator (not necessarily the immediate one) per node."""
    doms = dominator_sets(g)
    for n in g:
        if n == g.root:
            g.set_dominator(n, None)
        else:
            g.set_dominator(n, rng.choice(sorted(doms[n])))
