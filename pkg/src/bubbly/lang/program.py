"""Programs: symbol tables, rule resolution, LOIS checking and graph building."""

from __future__ import annotations

import operator
from dataclasses import dataclass, field

from ..dominance import initialize
from ..graph import CHOICE, Graph, Kind, NodeId, Symbol
from ..rewrite import App, PCon, PVar, Rhs, Rule, Var
from .syntax import (
    Call,
    DataDecl,
    ExprAst,
    LangError,
    Lit,
    Name,
    RuleDecl,
    Where,
    parse_declarations,
    parse_expression,
)

TRUE = Symbol("True", Kind.CONSTRUCTOR, 0)
FALSE = Symbol("False", Kind.CONSTRUCTOR, 0)
NIL = Symbol("[]", Kind.CONSTRUCTOR, 0)
CONS = Symbol(":", Kind.CONSTRUCTOR, 2)


def _pow(a: int, b: int) -> int:
    if b < 0:
        raise ArithmeticError("negative exponent")
    return a**b


def _div(a: int, b: int) -> int:
    if b == 0:
        raise ArithmeticError("division by zero")
    return a // b


BUILTINS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _div,
    "^": _pow,
    ">": operator.gt,
    "<": operator.lt,
    "==": operator.eq,
}


def int_symbol(value: int) -> Symbol:
    return Symbol(str(value), Kind.CONSTRUCTOR, 0)


def int_value(sym: Symbol) -> int | None:
    if not sym.is_constructor or sym.arity:
        return None
    try:
        return int(sym.name)
    except ValueError:
        return None


def bool_symbol(value: bool) -> Symbol:
    return TRUE if value else FALSE


_x, _y = PVar("x"), PVar("y")
CHOICE_RULES = (
    Rule(CHOICE, (_x, PVar("_")), Rhs(Var("x"))),
    Rule(CHOICE, (PVar("_"), _y), Rhs(Var("y"))),
)


# -- definitional trees ---------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    rule: Rule


@dataclass(frozen=True)
class Branch:
    position: tuple[int, ...]  # argument indexes from the operation node
    children: dict  # constructor Symbol -> tree


DefTree = Leaf | Branch


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int = 0

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


@dataclass
class Program:
    constructors: dict[str, Symbol] = field(default_factory=dict)
    operations: dict[str, Symbol] = field(default_factory=dict)
    rules: dict[str, list[Rule]] = field(default_factory=dict)
    types: dict[str, list[Symbol]] = field(default_factory=dict)
    trees: dict[str, DefTree] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def constructor(self, name: str) -> Symbol | None:
        if name in self.constructors:
            return self.constructors[name]
        try:
            return int_symbol(int(name))
        except ValueError:
            return None

    def symbol(self, name: str) -> Symbol | None:
        if name == "?":
            return CHOICE
        return self.operations.get(name) or self.constructor(name)

    @property
    def is_lois(self) -> bool:
        return not self.diagnostics


def _base_program() -> Program:
    p = Program()
    for sym in (TRUE, FALSE, NIL, CONS):
        p.constructors[sym.name] = sym
    p.types["Bool"] = [FALSE, TRUE]
    p.types["List"] = [NIL, CONS]
    for name in BUILTINS:
        p.operations[name] = Symbol(name, Kind.OPERATION, 2)
    p.rules["?"] = list(CHOICE_RULES)
    return p


def parse_program(text: str) -> Program:
    p = _base_program()
    decls = parse_declarations(text)
    for d in decls:
        if isinstance(d, DataDecl):
            if d.name in p.types:
                raise LangError(f"duplicate type {d.name!r}", d.line)
            syms = []
            for name, arity, line in d.constructors:
                if name in p.constructors:
                    raise LangError(f"duplicate constructor {name!r}", line)
                p.constructors[name] = sym = Symbol(name, Kind.CONSTRUCTOR, arity)
                syms.append(sym)
            p.types[d.name] = syms
    rule_decls = [d for d in decls if isinstance(d, RuleDecl)]
    for d in rule_decls:
        if d.name == "?":
            raise LangError("the choice operation '?' is predeclared", d.line, d.col)
        if d.name in BUILTINS:
            raise LangError(f"{d.name!r} is a built-in operation", d.line, d.col)
        if d.name[0].isupper() or d.name in p.constructors:
            raise LangError(f"cannot define rules for constructor {d.name!r}", d.line, d.col)
        arity = len(d.args)
        known = p.operations.get(d.name)
        if known is not None and known.arity != arity:
            raise LangError(
                f"{d.name!r} defined with {arity} arguments, earlier with {known.arity}",
                d.line,
                d.col,
            )
        p.operations[d.name] = Symbol(d.name, Kind.OPERATION, arity)
    for d in rule_decls:
        p.rules.setdefault(d.name, []).append(_resolve_rule(p, d))
    p.diagnostics = check_lois(p)
    return p


def _resolve_pattern(p: Program, pat, line: int):
    if isinstance(pat, Lit):
        return PCon(int_symbol(pat.value))
    if isinstance(pat, Name):
        if pat.name == "_" or pat.name[0].islower():
            return PVar(pat.name)
        sym = p.constructor(pat.name)
        if sym is None:
            raise LangError(f"undeclared constructor {pat.name!r}", line)
        if sym.arity:
            raise LangError(f"constructor {pat.name!r} needs {sym.arity} arguments", line)
        return PCon(sym)
    sym = p.symbol(pat.name)
    if sym is None:
        raise LangError(f"undeclared symbol {pat.name!r} in pattern", line)
    if sym.arity != len(pat.args):
        raise LangError(
            f"{pat.name!r} needs {sym.arity} arguments, got {len(pat.args)}", line
        )
    return PCon(sym, tuple(_resolve_pattern(p, a, line) for a in pat.args))


def _pattern_vars(pat) -> list[str]:
    if isinstance(pat, PVar):
        return [] if pat.name == "_" else [pat.name]
    return [v for a in pat.args for v in _pattern_vars(a)]


def _resolve_term(p: Program, e: ExprAst, scope: set[str], line: int):
    if isinstance(e, Lit):
        return App(int_symbol(e.value))
    if isinstance(e, Where):
        raise LangError("nested 'where' is not supported", line)
    name, args = (e.name, ()) if isinstance(e, Name) else (e.name, e.args)
    if name in scope:
        if args:
            raise LangError(f"variable {name!r} cannot be applied to arguments", line)
        return Var(name)
    sym = p.symbol(name)
    if sym is None:
        raise LangError(f"undefined name {name!r}", line)
    if sym.arity != len(args):
        raise LangError(
            f"{name!r} needs {sym.arity} arguments, got {len(args)} "
            "(partial application is not supported)",
            line,
        )
    return App(sym, tuple(_resolve_term(p, a, scope, line) for a in args))


def _term_vars(t) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= _term_vars(a)
    return out


def _check_locals(locals_: tuple, line: int) -> None:
    names = [n for n, _ in locals_]
    if len(set(names)) != len(names):
        raise LangError("duplicate local binding", line)
    deps = {n: _term_vars(t) & set(names) for n, t in locals_}
    state: dict[str, int] = {}

    def visit(n):
        if state.get(n) == 1:
            raise LangError(f"recursive local binding {n!r}", line)
        if state.get(n) == 2:
            return
        state[n] = 1
        for m in deps[n]:
            visit(m)
        state[n] = 2

    for n in names:
        visit(n)


def _resolve_rhs(p: Program, e: ExprAst, scope: set[str], line: int) -> Rhs:
    if isinstance(e, Where):
        local_names = {n for n, _ in e.bindings}
        inner = scope | local_names
        locals_ = tuple((n, _resolve_term(p, v, inner, line)) for n, v in e.bindings)
        _check_locals(locals_, line)
        return Rhs(_resolve_term(p, e.body, inner, line), locals_)
    return Rhs(_resolve_term(p, e, scope, line))


def _resolve_rule(p: Program, d: RuleDecl) -> Rule:
    args = tuple(_resolve_pattern(p, a, d.line) for a in d.args)
    variables = {v for a in args for v in _pattern_vars(a)}
    rhs = _resolve_rhs(p, d.rhs, variables, d.line)
    return Rule(p.operations[d.name], args, rhs, d.line)


# -- LOIS checking ------------------------------------------------------------------


def _at(pat, pos: tuple[int, ...]):
    for i in pos:
        if not isinstance(pat, PCon):
            return None
        pat = pat.args[i]
    return pat


def _overlap(a, b) -> bool:
    if isinstance(a, PVar) or isinstance(b, PVar):
        return True
    return a.symbol == b.symbol and all(_overlap(x, y) for x, y in zip(a.args, b.args))


def _var_positions(call, prefix=()) -> list[tuple[int, ...]]:
    out = []
    for i, a in enumerate(call.args):
        pos = prefix + (i,)
        if isinstance(a, PVar):
            out.append(pos)
        else:
            out.extend(_var_positions(a, pos))
    return out


def _refine(call: PCon, pos: tuple[int, ...], sym: Symbol) -> PCon:
    i, rest = pos[0], pos[1:]
    args = list(call.args)
    if rest:
        args[i] = _refine(args[i], rest, sym)
    else:
        args[i] = PCon(sym, tuple(PVar("_") for _ in range(sym.arity)))
    return PCon(call.symbol, tuple(args))


class _NotSequential(Exception):
    pass


def definitional_tree(op: Symbol, rules: list[Rule]) -> DefTree:
    """Organize the rules of ``op`` into a definitional tree.

    Raises ``_NotSequential`` with a message when no inductive position
    separates the rules.
    """

    def build(call: PCon, group: list[Rule]) -> DefTree:
        positions = sorted(_var_positions(call), key=lambda q: (len(q), q))
        for pos in positions:
            subs = [_at(r.lhs, pos) for r in group]
            if all(isinstance(s, PCon) for s in subs):
                children: dict[Symbol, list[Rule]] = {}
                for r, s in zip(group, subs):
                    children.setdefault(s.symbol, []).append(r)
                return Branch(
                    pos, {c: build(_refine(call, pos, c), rs) for c, rs in children.items()}
                )
        if len(group) == 1:
            return Leaf(group[0])
        for i, a in enumerate(group):
            for b in group[i + 1 :]:
                if _overlap(a.lhs, b.lhs):
                    raise _NotSequential(
                        f"overlapping rules for {op.name!r} (lines {a.line} and {b.line})"
                    )
        raise _NotSequential(f"rules for {op.name!r} are not inductively sequential")

    return build(PCon(op, tuple(PVar("_") for _ in range(op.arity))), rules)


def check_lois(p: Program) -> list[Diagnostic]:
    """Diagnostics for everything that keeps ``p`` from being LOIS.

    Also (re)builds the definitional trees of the operations that pass.
    """
    out: list[Diagnostic] = []
    p.trees = {}
    for name, rules in p.rules.items():
        if name == "?":
            continue
        op = p.operations[name]
        ok = True
        for r in rules:
            names = [v for a in r.args for v in _pattern_vars(a)]
            dup = sorted({v for v in names if names.count(v) > 1})
            if dup:
                out.append(Diagnostic(f"{name!r} is not left-linear: {', '.join(dup)}", r.line))
                ok = False
            bad = [s for a in r.args for s in _symbols(a) if not s.is_constructor]
            if bad:
                out.append(
                    Diagnostic(
                        f"{name!r} is not constructor-based: "
                        f"operation {bad[0].name!r} in a pattern",
                        r.line,
                    )
                )
                ok = False
        if not ok:
            continue
        try:
            p.trees[name] = definitional_tree(op, rules)
        except _NotSequential as e:
            out.append(Diagnostic(str(e), rules[0].line))
    return out


def _symbols(pat):
    if isinstance(pat, PCon):
        yield pat.symbol
        for a in pat.args:
            yield from _symbols(a)


# -- top-level expressions ----------------------------------------------------------


def _check_expr(p: Program, e: ExprAst, scope: set[str]) -> None:
    _resolve_rhs(p, e, scope, 0)


def parse_expr(text: str, p: Program) -> ExprAst:
    e = parse_expression(text)
    _check_expr(p, e, set())
    return e


def to_graph(ast: ExprAst, p: Program, *, debug: bool = False) -> Graph:
    """Build the graph of a top-level expression with immediate dominators."""
    rhs = _resolve_rhs(p, ast, set(), 0)
    g = Graph(debug=debug)
    local_terms = dict(rhs.locals)
    built: dict[str, NodeId] = {}

    def build(t) -> NodeId:
        if isinstance(t, Var):
            if t.name not in built:
                built[t.name] = build(local_terms[t.name])
            return built[t.name]
        return g.add_node(t.symbol, [build(a) for a in t.args])

    g.set_root(build(rhs.body))
    initialize(g)
    return g


def graph_of(text: str, p: Program, *, debug: bool = False) -> Graph:
    return to_graph(parse_expr(text, p), p, debug=debug)


# -- printing values -----------------------------------------------------------------


def format_term(g: Graph, n: NodeId | None = None) -> str:
    """Print the term rooted at ``n`` in surface syntax (sharing is unfolded)."""

    def fmt(n, atomic):
        sym = g.label(n)
        args = g.successors(n)
        value = int_value(sym)
        if value is not None:
            return f"({value})" if value < 0 and atomic else str(value)
        if sym == NIL:
            return "[]"
        if sym == CONS:
            items, tail = [], n
            while g.label(tail) == CONS:
                head, tail = g.successors(tail)
                items.append(head)
            if g.label(tail) == NIL:
                return "[" + ",".join(fmt(i, False) for i in items) + "]"
            s = f"{fmt(args[0], True)} : {fmt(args[1], False)}"
            return f"({s})" if atomic else s
        if not args:
            return sym.name
        if sym.name[0] in "!#$%&*+./<=>?@\\^|-~:" and len(args) == 2:
            s = f"{fmt(args[0], True)} {sym.name} {fmt(args[1], True)}"
        else:
            s = " ".join([sym.name, *(fmt(a, True) for a in args)])
        return f"({s})" if atomic else s

    return fmt(g.root if n is None else n, False)


def is_value(g: Graph, n: NodeId | None = None) -> bool:
    seen = set()
    todo = [g.root if n is None else n]
    while todo:
        x = todo.pop()
        if x in seen:
            continue
        seen.add(x)
        if not g.label(x).is_constructor:
            return False
        todo.extend(g.successors(x))
    return True
