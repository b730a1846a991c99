"""Demand-driven evaluation with fair interleaving of non-deterministic branches.

Each computation owns one graph.  A step walks the definitional trees from
the root to the outermost needed node and then rewrites it, bubbles a
demanded choice, or reports that the computation failed.  A choice that
reaches the root splits the computation in two; the driver schedules all
computations round robin, one step per turn, so a diverging alternative
never starves the other one.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .bubbling import BubbleStats, bubble
from .dominance import validate_attribute
from .graph import LEFT, RIGHT, Graph, NodeId, extract_alternative
from .lang.program import (
    BUILTINS,
    CHOICE_RULES,
    Branch,
    Program,
    bool_symbol,
    format_term,
    int_symbol,
    int_value,
)
from .rewrite import App, Match, PCon, Rhs, Rule, match_rule, rewrite_at

STRATEGIES = ("bubbling", "copying")


class Status(enum.Enum):
    RUNNING = "running"
    VALUE = "value"
    FAILED = "failed"
    SPLIT = "split"


class UnsoundAttribute(Exception):
    """A step left a graph whose dominator attribute or structure is broken."""


@dataclass
class EvalConfig:
    strategy: str = "bubbling"
    max_values: int = 16
    max_steps: int = 100_000
    validate: bool = False
    trace: Callable[[str], None] | None = None
    dot_dir: Path | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.max_values < 1 or self.max_steps < 1 or self.jobs < 1:
            raise ValueError("budgets must be positive")
        if self.dot_dir is not None:
            self.dot_dir = Path(self.dot_dir)


@dataclass
class Computation:
    graph: Graph
    ident: int = 0
    status: Status = Status.RUNNING
    steps: int = 0
    clones: int = 0
    children: tuple[Graph, Graph] | None = None
    last: str = ""  # trace fields of the most recent step
    stats: Counter = field(default_factory=Counter)


@dataclass
class ValueSet:
    values: dict[str, int]
    exhausted: bool
    stats: Counter

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, v) -> bool:
        return v in self.values

    def as_set(self) -> frozenset[str]:
        return frozenset(self.values)


def _follow(g: Graph, n: NodeId, position: tuple[int, ...]) -> NodeId:
    for i in position:
        n = g.successor(n, i)
    return n


class Evaluator:
    def __init__(self, program: Program, cfg: EvalConfig | None = None):
        if not program.is_lois:
            raise ValueError(
                "program is not LOIS: " + "; ".join(map(str, program.diagnostics))
            )
        self.program = program
        self.cfg = cfg or EvalConfig()
        self.total = 0  # steps taken by the driver

    # -- finding the next step -------------------------------------------------

    def _needed(self, g: Graph, n: NodeId, done: set[NodeId]):
        """The action for the outermost needed node below ``n``; None if a value."""
        sym = g.label(n)
        if sym.is_constructor:
            if n in done:
                return None
            for s in g.successors(n):
                action = self._needed(g, s, done)
                if action is not None:
                    return action
            done.add(n)
            return None
        if sym.is_choice:
            return ("split", n) if n == g.root else ("choice", n)
        if sym.name in BUILTINS:
            return self._builtin(g, n, done)
        tree = self.program.trees[sym.name]
        while isinstance(tree, Branch):
            x = _follow(g, n, tree.position)
            label = g.label(x)
            if not label.is_constructor:
                return self._needed(g, x, done)
            tree = tree.children.get(label)
            if tree is None:
                return ("fail", n)
        return ("rule", n, tree.rule)

    def _builtin(self, g: Graph, n: NodeId, done: set[NodeId]):
        args = g.successors(n)
        for a in args:
            if not g.label(a).is_constructor:
                return self._needed(g, a, done)
        x, y = (int_value(g.label(a)) for a in args)
        if x is None or y is None:
            return ("fail", n)
        op = g.label(n)
        try:
            result = BUILTINS[op.name](x, y)
        except ArithmeticError:
            return ("fail", n)
        sym = bool_symbol(result) if isinstance(result, bool) else int_symbol(result)
        pattern = tuple(PCon(g.label(a)) for a in args)
        return ("rule", n, Rule(op, pattern, Rhs(App(sym))))

    # -- one step ----------------------------------------------------------------

    def step(self, comp: Computation) -> Computation:
        if comp.status is not Status.RUNNING:
            raise ValueError(f"computation {comp.ident} is {comp.status.value}")
        g = comp.graph
        comp.steps += 1
        before = g.counters.copy()
        action = self._needed(g, g.root, set())
        if action is None:
            comp.status = Status.VALUE
            comp.last = f"value\t{g.root}\t{format_term(g)}"
            return comp
        kind, n = action[0], action[1]
        if kind == "fail":
            comp.status = Status.FAILED
            comp.stats["failures"] += 1
            comp.last = f"fail\t{n}\t{g.label(n)}"
        elif kind == "rule":
            rule = action[2]
            m = match_rule(g, n, rule)
            assert isinstance(m, Match), (rule, m)
            made = rewrite_at(g, n, rule, m)
            comp.stats["rewrites"] += 1
            touched = ",".join(map(str, sorted(set(m.redex) | set(made.fresh))))
            comp.last = f"rewrite\t{touched}\t{rule}"
        elif self.cfg.strategy == "copying":
            self._copy(comp, n)
        elif kind == "split":
            comp.status = Status.SPLIT
            comp.stats["splits"] += 1
            comp.last = f"split\t{n}\troot choice"
        else:
            st = BubbleStats(n, g.dominator(n))
            r = bubble(g, n, stats=st)
            comp.clones += st.surviving_fresh
            comp.stats["bubbles"] += 1
            comp.stats["cloned"] += st.surviving_fresh
            comp.last = f"bubble\t{n},{st.destination},{r}\t{n}->{st.destination}"
        comp.stats.update(g.counters - before)
        if self.cfg.validate:
            if comp.status is Status.SPLIT and comp.children is None:
                comp.children = self._extract(comp.graph)
            for h in comp.children or (g,):
                self._validate(h, comp)
        return comp

    def _copy(self, comp: Computation, c: NodeId) -> None:
        g = comp.graph
        kids = []
        for rule in CHOICE_RULES:
            h = g.copy()
            m = match_rule(h, c, rule)
            rewrite_at(h, c, rule, m, allow_choice=True)
            kids.append(h)
        comp.children = (kids[0], kids[1])
        comp.status = Status.SPLIT
        comp.clones += 2 * len(g)
        comp.stats["copies"] += 1
        comp.stats["cloned"] += 2 * len(g)
        comp.last = f"split\t{c}\tcopy {len(g)} nodes"

    @staticmethod
    def _extract(g: Graph) -> tuple[Graph, Graph]:
        return extract_alternative(g, LEFT), extract_alternative(g, RIGHT)

    def _validate(self, g: Graph, comp: Computation) -> None:
        problems = g.problems()
        report = validate_attribute(g)
        if problems or not report.ok:
            bad = ", ".join(f"{e.node}->{e.stored}" for e in report.failures)
            raise UnsoundAttribute(
                f"computation {comp.ident} after step {comp.steps} ({comp.last.split(chr(9))[0]}): "
                + "; ".join(problems + ([f"unsound dominators {bad}"] if bad else []))
            )

    def normalize(self, comp: Computation) -> Computation:
        """Step one computation until it is no longer running (or out of budget)."""
        while comp.status is Status.RUNNING and comp.steps < self.cfg.max_steps:
            self.step(comp)
        return comp

    # -- the driver --------------------------------------------------------------

    def compute_values(self, g: Graph) -> ValueSet:
        cfg = self.cfg
        queue = deque([Computation(g, ident=0)])
        next_id = 1
        values: dict[str, int] = {}
        stats: Counter = Counter()
        self.total = 0
        pool = ThreadPoolExecutor(cfg.jobs) if cfg.jobs > 1 else None
        try:
            done = False
            while queue and not done:
                room = cfg.max_steps - self.total
                if room <= 0:
                    break
                batch = [queue.popleft() for _ in range(min(room, len(queue)))]
                if pool is not None:
                    list(pool.map(self.step, batch))
                for comp in batch:
                    if pool is None:
                        self.step(comp)
                    self.total += 1
                    stats.update(comp.stats)
                    comp.stats.clear()
                    self._emit(comp, len(queue), len(values))
                    if comp.status is Status.RUNNING:
                        queue.append(comp)
                    elif comp.status is Status.VALUE:
                        text = format_term(comp.graph)
                        values[text] = values.get(text, 0) + 1
                        if len(values) >= cfg.max_values:
                            done = True
                    elif comp.status is Status.SPLIT:
                        kids = comp.children or self._extract(comp.graph)
                        for h in kids:
                            queue.append(Computation(h, ident=next_id))
                            next_id += 1
                    if done:
                        # computations of this round that were not reached stay queued
                        rest = batch[batch.index(comp) + 1 :]
                        queue.extendleft(reversed(rest))
                        break
        finally:
            if pool is not None:
                pool.shutdown()
        stats["steps"] = self.total
        stats["values"] = sum(values.values())
        stats["duplicates"] = stats["values"] - len(values)
        return ValueSet(values, exhausted=not queue, stats=stats)

    def _emit(self, comp: Computation, queued: int, found: int) -> None:
        cfg = self.cfg
        if cfg.trace is not None:
            cfg.trace(
                f"{self.total}\t{comp.ident}\t{comp.last}\tsteps={self.total} "
                f"values={found} queue={queued}"
            )
        if cfg.dot_dir is not None:
            cfg.dot_dir.mkdir(parents=True, exist_ok=True)
            path = cfg.dot_dir / f"step-{self.total:06d}-c{comp.ident}.dot"
            path.write_text(comp.graph.to_dot(f"step{self.total}"))


def compute_values(program: Program, g: Graph, cfg: EvalConfig | None = None) -> ValueSet:
    return Evaluator(program, cfg).compute_values(g)
