"""Bubbling steps that only look at the paths between a choice and its dominator.

A bubbling step moves a choice ``c`` up to its stored dominator ``d``:
every node on a path from ``d`` to ``c`` is cloned once per alternative,
the clone of ``c`` in each copy is replaced by the corresponding
alternative, and a fresh choice over the two copies takes the place of
``d``.  The dominator attribute is repaired on the way, so the next step
again finds a viable destination without searching the graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import CHOICE, LEFT, RIGHT, Graph, GraphError, NodeId


class CloneMap(dict):
    """Original node -> clone, for one side of one bubbling step."""

    def __init__(self):
        super().__init__()
        self.images: set[NodeId] = set()

    def __setitem__(self, key, value):
        super().__setitem__(key, value)
        self.images.add(value)


@dataclass
class BubbleStats:
    origin: NodeId
    destination: NodeId
    root: NodeId = -1
    path_nodes: int = 0
    cloned: list[int] = field(default_factory=list)

    @property
    def surviving_fresh(self) -> int:
        # both clones of the origin are discarded; the new choice survives
        return sum(self.cloned) - len(self.cloned) + 1


def traverse(
    g: Graph,
    x: NodeId,
    d: NodeId,
    cmap: CloneMap,
    r: NodeId,
    orphans: set[NodeId],
) -> None:
    """Clone ``x`` and, recursively, every path from ``d`` down to ``x``.

    Nodes outside the cloned region whose stored dominator is a cloned node
    are added to ``orphans``; the caller points them at ``r`` once both
    sides are done.  Deferring the write keeps the original dominators
    readable for the whole step.
    """
    if x in cmap:
        return
    x2 = g.add_node(g.label(x), g.successors(x))
    cmap[x] = x2
    if x != d:
        for y, i in sorted(g.predecessors(x)):
            if y in cmap.images:
                continue  # an unpatched edge from a clone made earlier this side
            traverse(g, y, d, cmap, r, orphans)
            g.set_successor(cmap[y], i, x2)
        # A stored dominator above d is not cloned; r dominates every clone.
        g.set_dominator(x2, cmap.get(g.dominator(x), r))
    for z in g.dominated(x):
        if z not in cmap:
            orphans.add(z)


def bubble(g: Graph, c: NodeId, *, stats: BubbleStats | None = None) -> NodeId:
    """Execute one bubbling step at choice ``c``; return the new choice node."""
    if not g.label(c).is_choice:
        raise GraphError(f"node {c} is not a choice")
    if c == g.root:
        raise GraphError("a choice at the root is split, not bubbled")
    d = g.dominator(c)
    above = g.dominator(d)
    alternatives = g.successors(c)
    alt_preds = [g.predecessors(a) for a in alternatives]
    alt_doms = [g.dominator(a) for a in alternatives]

    # Placeholder edges to d; both are redirected before d itself is replaced.
    r = g.add_node(CHOICE, [d, d])
    if above is not None:
        g.set_dominator(r, above)

    maps: list[CloneMap] = []
    orphans: set[NodeId] = set()
    for side in (LEFT, RIGHT):
        cmap = CloneMap()
        traverse(g, c, d, cmap, r, orphans)
        g.set_successor(r, side, cmap[d])
        g.set_dominator(cmap[d], r)
        g.replace(cmap[c], alternatives[side])
        maps.append(cmap)

    path = maps[LEFT].keys()
    for z in orphans:
        if z not in path and z not in alternatives:
            g.set_dominator(z, r)
    for side, a in enumerate(alternatives):
        if alt_preds[side] == {(c, side)}:
            # reachable only through this side's copy of the paths
            g.set_dominator(a, maps[side][d])
        elif alt_doms[side] in path:
            g.set_dominator(a, r)
        else:
            g.set_dominator(a, alt_doms[side])

    g.replace(d, r)
    removed = g.collect([d, maps[LEFT][c], maps[RIGHT][c]])
    stray = [z for zs in removed.values() for z in zs]
    assert not stray, f"nodes {stray} lost their dominator during bubbling"

    if stats is not None:
        stats.origin, stats.destination, stats.root = c, d, r
        stats.path_nodes = len(path)
        stats.cloned = [len(m) for m in maps]
    return r
