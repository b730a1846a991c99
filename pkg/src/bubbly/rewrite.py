"""Matching and dominator-preserving rewrite steps."""

from __future__ import annotations

from dataclasses import dataclass, field

from .dominance import chain_meet
from .graph import Graph, GraphError, NodeId, Symbol

# -- patterns and right-hand sides -----------------------------------------


@dataclass(frozen=True)
class PVar:
    name: str  # "_" is an anonymous variable

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PCon:
    symbol: Symbol
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol.name
        return "(" + " ".join([self.symbol.name, *map(str, self.args)]) + ")"


Pattern = PVar | PCon


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    symbol: Symbol
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol.name
        return "(" + " ".join([self.symbol.name, *map(str, self.args)]) + ")"


Term = Var | App


@dataclass(frozen=True)
class Rhs:
    """A right-hand side: a body plus non-recursive ``where`` bindings."""

    body: Term
    locals: tuple[tuple[str, Term], ...] = ()

    def __str__(self) -> str:
        s = str(self.body)
        if self.locals:
            s += " where " + "; ".join(f"{k} = {v}" for k, v in self.locals)
        return s


@dataclass(frozen=True)
class Rule:
    operation: Symbol
    args: tuple  # argument patterns
    rhs: Rhs
    line: int = 0

    @property
    def lhs(self) -> PCon:
        return PCon(self.operation, self.args)

    def variables(self) -> list[str]:
        out: list[str] = []

        def walk(p):
            if isinstance(p, PVar):
                if p.name != "_":
                    out.append(p.name)
            else:
                for a in p.args:
                    walk(a)

        for a in self.args:
            walk(a)
        return out

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


# -- matching ---------------------------------------------------------------


@dataclass(frozen=True)
class Match:
    bindings: dict
    redex: tuple  # nodes matched by non-variable positions, preorder from the root


@dataclass(frozen=True)
class NoMatch:
    pass


@dataclass(frozen=True)
class Demand:
    position: NodeId


MatchResult = Match | NoMatch | Demand


def match_rule(g: Graph, f: NodeId, rule: Rule) -> MatchResult:
    """Match ``rule`` at ``f``.

    A constructor clash anywhere wins over a demand; otherwise the leftmost
    demanded node (an operation or choice where the pattern needs a
    constructor) is reported.
    """
    if g.label(f) != rule.operation:
        raise GraphError(f"rule for {rule.operation} tried at a {g.label(f)} node")
    bindings: dict[str, NodeId] = {}
    redex = [f]
    demands: list[NodeId] = []
    clash = False

    def walk(p, n):
        nonlocal clash
        if isinstance(p, PVar):
            if p.name != "_":
                bindings[p.name] = n
            return
        sym = g.label(n)
        if not sym.is_constructor:
            demands.append(n)
            return
        if sym != p.symbol:
            clash = True
            return
        if n not in redex:
            redex.append(n)
        for q, s in zip(p.args, g.successors(n)):
            walk(q, s)

    for p, n in zip(rule.args, g.successors(f)):
        walk(p, n)
    if clash:
        return NoMatch()
    if demands:
        return Demand(demands[0])
    return Match(bindings, tuple(redex))


# -- contractum -------------------------------------------------------------


@dataclass
class Contractum:
    root: NodeId
    fresh: list[NodeId] = field(default_factory=list)


def build_contractum(g: Graph, match: Match, rhs: Rhs) -> Contractum:
    local_terms = dict(rhs.locals)
    built: dict[str, NodeId] = {}
    fresh: list[NodeId] = []
    active: set[str] = set()

    def build(t) -> NodeId:
        if isinstance(t, Var):
            if t.name in local_terms:
                if t.name not in built:
                    if t.name in active:
                        raise GraphError(f"recursive local binding {t.name!r}")
                    active.add(t.name)
                    built[t.name] = build(local_terms[t.name])
                    active.discard(t.name)
                return built[t.name]
            try:
                return match.bindings[t.name]
            except KeyError:
                raise GraphError(f"unbound variable {t.name!r} in right-hand side") from None
        n = g.add_node(t.symbol, [build(a) for a in t.args])
        fresh.append(n)
        return n

    # Unused locals are never built; they would be garbage immediately.
    return Contractum(build(rhs.body), fresh)


def rewrite_at(
    g: Graph, f: NodeId, rule: Rule, match: Match, *, allow_choice: bool = False
) -> Contractum:
    """Replace the redex at ``f`` and repair the dominator attribute.

    Nodes dominated by an erased redex node move to the contractum root,
    fresh contractum nodes are dominated by the contractum root, and the
    contractum root inherits the dominator of ``f``.  For collapsing rules
    the contractum root already exists and may be reachable around ``f``, so
    it gets the meet of its own and f's dominator chains instead.
    """
    if g.label(f).is_choice and not allow_choice:
        raise GraphError("choice nodes take bubbling steps, not rewrite steps")
    was_root = f == g.root
    old_dominator = None if was_root else g.dominator(f)
    contractum = build_contractum(g, match, rule.rhs)
    e = contractum.root
    created = set(contractum.fresh)
    collapsing = e not in created
    meet = None
    if collapsing and not was_root:
        meet = chain_meet(g, g.dominator(e), old_dominator)

    g.replace(f, e)
    removed = g.collect([f])

    for d in match.redex:
        for z in removed.get(d, ()):
            if z != e:
                g.set_dominator(z, e)
    stray = [z for d, zs in removed.items() if d not in match.redex for z in zs]
    assert not stray, f"nodes {stray} were dominated by erased non-redex nodes"
    for c in contractum.fresh:
        if c != e and c in g:
            g.set_dominator(c, e)
    if not was_root:
        g.set_dominator(e, meet if collapsing else old_dominator)

    # A shared redex node survives, but the contractum may now reach the
    # nodes it dominated without passing through it.  Their new dominator
    # must lie on every old path (through p) and every new one (through e).
    # Preorder handles ancestors first, so each chain is already sound.
    for p in match.redex:
        if p == f or p not in g:
            continue
        stale = [z for z in g.dominated(p) if z != e]
        if stale:
            w = chain_meet(g, p, e)
            for z in stale:
                g.set_dominator(z, w)
    return contractum
