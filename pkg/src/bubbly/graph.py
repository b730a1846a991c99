"""Rooted term graphs with successor, predecessor and dominator indexes.

A graph stores, for every node, its label, its ordered successors, the
multiset of incoming edges as ``(predecessor, argument index)`` pairs and a
stored dominator.  The dominator of the root is always absent.  Both the
predecessor relation and the dominator relation are kept bidirectionally so
that rewriting and bubbling steps only ever look at nodes near the step.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Iterator

NodeId = int

LEFT = 0
RIGHT = 1


class Kind(enum.Enum):
    CONSTRUCTOR = "constructor"
    OPERATION = "operation"
    CHOICE = "choice"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: Kind
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name!r}")

    def __str__(self) -> str:
        return self.name

    @property
    def is_constructor(self) -> bool:
        return self.kind is Kind.CONSTRUCTOR

    @property
    def is_operation(self) -> bool:
        return self.kind is Kind.OPERATION

    @property
    def is_choice(self) -> bool:
        return self.kind is Kind.CHOICE


CHOICE = Symbol("?", Kind.CHOICE, 2)


class GraphError(Exception):
    """Raised when a graph operation violates its contract."""


@dataclass(eq=False)
class Node:
    __slots__ = ("label", "successors", "dominator", "predecessors", "dominated")

    label: Symbol
    successors: list[NodeId]
    dominator: NodeId | None
    predecessors: set[tuple[NodeId, int]]
    dominated: set[NodeId]


def _side(side) -> int:
    if side in (LEFT, "left"):
        return LEFT
    if side in (RIGHT, "right"):
        return RIGHT
    raise ValueError(f"side must be left or right, not {side!r}")


class Graph:
    """A mutable rooted term graph.

    Node identifiers are small integers handed out by a monotone counter, so
    an identifier is never reused within one graph.  Every accessor records
    the node it looks at while a :meth:`track` block is active, which is how
    the locality of a step is measured.
    """

    def __init__(self, *, debug: bool = False):
        self._nodes: dict[NodeId, Node] = {}
        self._root: NodeId | None = None
        self._next = 0
        self.debug = debug
        self.counters: Counter[str] = Counter()
        self._touched: set[NodeId] | None = None

    # -- basic access -----------------------------------------------------

    @property
    def root(self) -> NodeId:
        if self._root is None:
            raise GraphError("graph has no root")
        return self._root

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, n) -> bool:
        return n in self._nodes

    def __iter__(self) -> Iterator[NodeId]:
        return iter(sorted(self._nodes))

    def _node(self, n: NodeId) -> Node:
        try:
            node = self._nodes[n]
        except KeyError:
            raise GraphError(f"unknown node {n}") from None
        if self._touched is not None:
            self._touched.add(n)
        return node

    def label(self, n: NodeId) -> Symbol:
        return self._node(n).label

    def successors(self, n: NodeId) -> tuple[NodeId, ...]:
        return tuple(self._node(n).successors)

    def successor(self, n: NodeId, i: int) -> NodeId:
        return self._node(n).successors[i]

    def predecessors(self, n: NodeId) -> frozenset[tuple[NodeId, int]]:
        return frozenset(self._node(n).predecessors)

    def dominator(self, n: NodeId) -> NodeId | None:
        return self._node(n).dominator

    def dominated(self, n: NodeId) -> frozenset[NodeId]:
        """Nodes whose stored dominator is ``n``."""
        return frozenset(self._node(n).dominated)

    # -- mutation ---------------------------------------------------------

    def add_node(self, label: Symbol, successors: Iterable[NodeId] = ()) -> NodeId:
        successors = list(successors)
        if len(successors) != label.arity:
            raise GraphError(
                f"{label.name!r} has arity {label.arity}, got {len(successors)} successors"
            )
        for s in successors:
            self._node(s)
        n = self._next
        self._next += 1
        self._nodes[n] = Node(label, successors, None, set(), set())
        for i, s in enumerate(successors):
            self._nodes[s].predecessors.add((n, i))
        if self._touched is not None:
            self._touched.add(n)
        self.counters["nodes"] += 1
        self.counters["labels"] += 1
        self.counters["successors"] += len(successors)
        self.counters["predecessors"] += len(successors)
        if self._root is None:
            self._root = n
        return n

    def set_root(self, n: NodeId) -> None:
        self._node(n)
        self._root = n
        self.set_dominator(n, None)

    def set_successor(self, p: NodeId, i: int, q: NodeId) -> None:
        node = self._node(p)
        self._node(q)
        old = node.successors[i]
        if old in self._nodes:
            self._nodes[old].predecessors.discard((p, i))
        node.successors[i] = q
        self._nodes[q].predecessors.add((p, i))
        self.counters["successors"] += 1
        self.counters["predecessors"] += 1

    def set_dominator(self, n: NodeId, d: NodeId | None) -> None:
        node = self._node(n)
        if d is not None:
            if d == n:
                raise GraphError(f"node {n} cannot dominate itself")
            self._node(d)
        old = node.dominator
        if old is not None and old in self._nodes:
            self._nodes[old].dominated.discard(n)
        node.dominator = d
        if d is not None:
            self._nodes[d].dominated.add(n)
        self.counters["dominators"] += 1

    def replace(self, p: NodeId, q: NodeId) -> None:
        """Redirect every edge into ``p`` to ``q``; ``q`` inherits p's dominator.

        When ``p`` is the root, ``q`` becomes the root.  ``p`` keeps its own
        outgoing edges; a later collection removes it once unreachable.
        """
        if p == q:
            raise GraphError(f"cannot replace node {p} with itself")
        source = self._node(p)
        self._node(q)
        if self.debug and self._reaches(q, {y for y, _ in source.predecessors}):
            raise GraphError(f"replacing {p} with {q} would create a cycle")
        for y, i in sorted(source.predecessors):
            self.set_successor(y, i, q)
        if self._root == p:
            self.set_root(q)
        else:
            self.set_dominator(q, source.dominator)

    def _reaches(self, start: NodeId, targets: set[NodeId]) -> bool:
        return not targets.isdisjoint(self.reachable(start))

    def _remove(self, n: NodeId) -> Node:
        node = self._nodes.pop(n)
        if self._touched is not None:
            self._touched.add(n)
        for i, s in enumerate(node.successors):
            if s in self._nodes:
                self._nodes[s].predecessors.discard((n, i))
        if node.dominator is not None and node.dominator in self._nodes:
            self._nodes[node.dominator].dominated.discard(n)
        return node

    def collect(self, seeds: Iterable[NodeId]) -> dict[NodeId, set[NodeId]]:
        """Remove the seeds that lost all incoming edges, cascading downwards.

        Acyclic graphs make this exact: a non-root node with no predecessor
        is unreachable, and so is anything whose predecessors all went away.
        Returns every removed node mapped to the surviving nodes it was the
        stored dominator of; those survivors need a new dominator.
        """
        removed: dict[NodeId, set[NodeId]] = {}
        stack = [n for n in seeds]
        while stack:
            n = stack.pop()
            if n not in self._nodes or n == self._root:
                continue
            if self._node(n).predecessors:
                continue
            node = self._remove(n)
            removed[n] = node.dominated
            stack.extend(reversed(node.successors))
        for n, dominated in removed.items():
            dominated.difference_update(removed)
        return removed

    def gc(self) -> set[NodeId]:
        """Remove every node unreachable from the root."""
        live = self.reachable()
        dead = set(self._nodes) - live
        for n in sorted(dead):
            self._remove(n)
        return dead

    # -- whole-graph queries ------------------------------------------------

    def reachable(self, start: NodeId | None = None) -> set[NodeId]:
        start = self.root if start is None else start
        seen = {start}
        todo = deque([start])
        while todo:
            n = todo.popleft()
            for s in self._nodes[n].successors:
                if s not in seen:
                    seen.add(s)
                    todo.append(s)
        return seen

    def copy(self) -> Graph:
        g = Graph(debug=self.debug)
        g._nodes = {
            n: Node(x.label, list(x.successors), x.dominator, set(x.predecessors), set(x.dominated))
            for n, x in self._nodes.items()
        }
        g._root = self._root
        g._next = self._next
        return g

    def problems(self) -> list[str]:
        """Structural invariant violations (dominator soundness not included)."""
        out = []
        if self._root is None or self._root not in self._nodes:
            return ["root missing"]
        edges: set[tuple[NodeId, NodeId, int]] = set()
        for n, node in self._nodes.items():
            if len(node.successors) != node.label.arity:
                out.append(f"node {n}: arity mismatch")
            for i, s in enumerate(node.successors):
                if s not in self._nodes:
                    out.append(f"node {n}: dangling successor {s}")
                edges.add((s, n, i))
        back = {(n, p, i) for n, node in self._nodes.items() for p, i in node.predecessors}
        if edges != back:
            out.append("predecessor index is not the inverse of the successor relation")
        for n, node in self._nodes.items():
            if (node.dominator is None) != (n == self._root):
                out.append(f"node {n}: dominator presence wrong")
            if node.dominator is not None:
                if node.dominator not in self._nodes:
                    out.append(f"node {n}: dangling dominator {node.dominator}")
                elif n not in self._nodes[node.dominator].dominated:
                    out.append(f"node {n}: missing from inverse dominator index")
            for z in node.dominated:
                if z not in self._nodes or self._nodes[z].dominator != n:
                    out.append(f"node {n}: stale inverse dominator entry {z}")
        if set(self._nodes) - self.reachable():
            out.append("unreachable nodes present")
        if self._has_cycle():
            out.append("graph has a cycle")
        return out

    def check(self) -> None:
        problems = self.problems()
        if problems:
            raise GraphError("; ".join(problems))

    def _has_cycle(self) -> bool:
        state: dict[NodeId, int] = {}
        for start in self._nodes:
            if start in state:
                continue
            stack = [(start, iter(self._nodes[start].successors))]
            state[start] = 1
            while stack:
                n, it = stack[-1]
                for s in it:
                    if state.get(s) == 1:
                        return True
                    if s not in state:
                        state[s] = 1
                        stack.append((s, iter(self._nodes[s].successors)))
                        break
                else:
                    state[n] = 2
                    stack.pop()
        return False

    def canonical_form(self, *, dominators: bool = False) -> tuple:
        """A rename-invariant description of the graph.

        Nodes are numbered in depth-first preorder from the root following
        successor order; two graphs are isomorphic iff their forms agree.
        """
        order: dict[NodeId, int] = {}
        stack = [self.root]
        while stack:
            n = stack.pop()
            if n in order:
                continue
            order[n] = len(order)
            stack.extend(reversed(self._nodes[n].successors))
        rows = []
        for n in sorted(order, key=order.__getitem__):
            node = self._nodes[n]
            row = (node.label.name, node.label.kind.value, tuple(order[s] for s in node.successors))
            if dominators:
                row += (None if node.dominator is None else order.get(node.dominator, -1),)
            rows.append(row)
        return tuple(rows)

    def isomorphic(self, other: Graph, *, dominators: bool = False) -> bool:
        return self.canonical_form(dominators=dominators) == other.canonical_form(
            dominators=dominators
        )

    @contextmanager
    def track(self) -> Iterator[set[NodeId]]:
        """Record every node id read or written inside the block."""
        outer = self._touched
        self._touched = touched = set()
        try:
            yield touched
        finally:
            self._touched = outer
            if outer is not None:
                outer |= touched

    def to_dot(self, name: str = "g") -> str:
        lines = [f"digraph {name} {{"]
        for n in sorted(self._nodes):
            node = self._nodes[n]
            label = node.label.name.replace("\\", "\\\\").replace('"', '\\"')
            shape = ", shape=doublecircle" if n == self._root else ""
            lines.append(f'  n{n} [label="{label}"{shape}];')
        for n in sorted(self._nodes):
            for i, s in enumerate(self._nodes[n].successors):
                lines.append(f'  n{n} -> n{s} [label="{i}"];')
        for n in sorted(self._nodes):
            d = self._nodes[n].dominator
            if d is not None:
                lines.append(f"  n{n} -> n{d} [style=dashed, color=gray];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"<Graph root={self._root} nodes={len(self._nodes)}>"


def extract_alternative(g: Graph, side) -> Graph:
    """The subgraph rooted at one alternative of a root choice.

    Stored dominators that fall outside the extracted part are reset to the
    new root; all others stay (sound for acyclic graphs).
    """
    side = _side(side)
    if not g.label(g.root).is_choice:
        raise GraphError("extract_alternative needs a choice at the root")
    top = g.successor(g.root, side)
    keep = g.reachable(top)
    out = Graph(debug=g.debug)
    out._next = g._next
    out._root = top
    for n in keep:
        node = g._nodes[n]
        preds = {(p, i) for p, i in node.predecessors if p in keep}
        out._nodes[n] = Node(node.label, list(node.successors), None, preds, set())
    for n in sorted(keep):
        if n == top:
            continue
        d = g._nodes[n].dominator
        out.set_dominator(n, d if d in keep else top)
    out.counters.clear()
    return out
