"""Slow, independent reference constructions used by the tests.

Nothing here calls into the dominance or bubbling modules; graphs are only
read through labels, successors and the root.
"""

from collections import deque

from bubbly.graph import CHOICE, Graph


def all_paths(g, target, start=None):
    """Every path from ``start`` (default: the root) to ``target``, as tuples."""
    out = []

    def walk(n, path):
        path = path + (n,)
        if n == target:
            out.append(path)
            return
        for s in set(g.successors(n)):
            walk(s, path)

    walk(g.root if start is None else start, ())
    return out


def dominates_by_paths(g, d, n):
    if d == n:
        return False
    return all(d in p for p in all_paths(g, n))


def reachable_bfs(g):
    seen = {g.root}
    todo = deque([g.root])
    while todo:
        for s in g.successors(todo.popleft()):
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def build(nodes, root):
    """A Graph from ``{id: (label, [successor ids])}``, keeping only what root reaches."""
    g = Graph()
    made = {}

    def make(n):
        if n not in made:
            label, succ = nodes[n]
            made[n] = g.add_node(label, [make(s) for s in succ])
        return made[n]

    g.set_root(make(root))
    return g


def literal_bubble(g, c, d):
    """Bubble choice ``c`` to ``d`` by enumerating paths, renaming twice and replacing.

    The subgraph at d is copied once per alternative with every node on a
    d-to-c path renamed fresh and c replaced by that alternative; a fresh
    choice over the two copies then replaces d.
    """
    on_path = {n for p in all_paths(g, c, start=d) for n in p}
    nodes = {n: (g.label(n), list(g.successors(n))) for n in reachable_bfs(g)}
    fresh = max(nodes) + 1
    tops = []
    for alt in g.successors(c):
        theta = {}
        for n in sorted(on_path - {c}):
            theta[n] = fresh
            fresh += 1

        def image(s, alt=alt, theta=theta):
            return alt if s == c else theta.get(s, s)

        for n, new in theta.items():
            label, succ = nodes[n]
            nodes[new] = (label, [image(s) for s in succ])
        tops.append(theta[d])
    r = fresh
    nodes[r] = (CHOICE, tops)
    for n, (label, succ) in list(nodes.items()):
        if n != r:
            nodes[n] = (label, [r if s == d else s for s in succ])
    root = r if g.root == d else g.root
    return build(nodes, root)
