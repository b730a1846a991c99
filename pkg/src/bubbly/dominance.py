"""Brute-force dominance queries.

Everything here works by deleting a node and checking what the root can
still reach, O(V*E) per query.  It is meant for validation and for setting
up the initial attribute of small top-level expressions; evaluation steps
never call into it except for :func:`chain_meet`, which only walks stored
dominator chains.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import Graph, GraphError, NodeId


def _reach_avoiding(g: Graph, avoid: NodeId) -> set[NodeId]:
    root = g.root
    if avoid == root:
        return set()
    seen = {root}
    todo = deque([root])
    while todo:
        n = todo.popleft()
        for s in g.successors(n):
            if s != avoid and s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def dominates(g: Graph, d: NodeId, n: NodeId) -> bool:
    """Proper dominance: every root-to-``n`` path contains ``d`` and ``d != n``."""
    if d not in g or n not in g:
        raise GraphError(f"unknown node in dominates({d}, {n})")
    if d == n:
        return False
    return n not in _reach_avoiding(g, d)


def dominator_sets(g: Graph) -> dict[NodeId, set[NodeId]]:
    """Map each node to the set of its proper dominators."""
    nodes = list(g)
    doms: dict[NodeId, set[NodeId]] = {n: set() for n in nodes}
    for d in nodes:
        live = _reach_avoiding(g, d)
        for n in nodes:
            if n != d and n not in live:
                doms[n].add(d)
    return doms


def _closest(doms: dict[NodeId, set[NodeId]], n: NodeId) -> NodeId:
    # Proper dominators of n form a chain; the closest has the most dominators.
    return max(doms[n], key=lambda d: len(doms[d]))


def immediate_dominator(g: Graph, n: NodeId) -> NodeId:
    if n == g.root:
        raise GraphError("the root has no dominator")
    return _closest(dominator_sets(g), n)


def immediate_dominators(g: Graph) -> dict[NodeId, NodeId]:
    doms = dominator_sets(g)
    return {n: _closest(doms, n) for n in doms if n != g.root}


def initialize(g: Graph) -> None:
    """Store the immediate dominator of every non-root node."""
    for n, d in immediate_dominators(g).items():
        g.set_dominator(n, d)


@dataclass(frozen=True)
class DominatorEntry:
    node: NodeId
    stored: NodeId | None
    immediate: NodeId
    sound: bool


@dataclass
class DominatorReport:
    entries: list[DominatorEntry]

    @property
    def ok(self) -> bool:
        return all(e.sound for e in self.entries)

    @property
    def failures(self) -> list[DominatorEntry]:
        return [e for e in self.entries if not e.sound]

    @property
    def immediate_count(self) -> int:
        return sum(e.stored == e.immediate for e in self.entries)

    def __bool__(self) -> bool:
        return self.ok


def validate_attribute(g: Graph) -> DominatorReport:
    doms = dominator_sets(g)
    entries = []
    for n in g:
        if n == g.root:
            continue
        stored = g.dominator(n)
        entries.append(DominatorEntry(n, stored, _closest(doms, n), stored in doms[n]))
    return DominatorReport(entries)


def chain_meet(g: Graph, a: NodeId, b: NodeId) -> NodeId:
    """First node shared by the stored dominator chains starting at a and b.

    Both chains are walked in lockstep, so the cost depends on the distance
    to the meet, not on the depth of the graph.
    """
    seen: tuple[set, set] = ({a}, {b})
    cur: list[NodeId | None] = [a, b]
    if a == b:
        return a
    while cur[0] is not None or cur[1] is not None:
        for side in (0, 1):
            x = cur[side]
            if x is None:
                continue
            x = g.dominator(x)
            cur[side] = x
            if x is None:
                continue
            if x in seen[1 - side]:
                return x
            seen[side].add(x)
    raise GraphError(f"dominator chains of {a} and {b} do not meet")
