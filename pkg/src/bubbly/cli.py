"""Command-line front end: evaluate expressions, check programs, inspect dominators."""

from __future__ import annotations

import argparse
import os
import sys
from collections import Counter
from pathlib import Path

from .dominance import validate_attribute
from .evaluator import STRATEGIES, EvalConfig, Evaluator, UnsoundAttribute
from .graph import GraphError
from .lang import LangError, Program, parse_expr, parse_program, to_graph

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bubbly",
        description="Evaluate first-order functional logic programs by bubbling choices.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, expression=True):
        p.add_argument("program", type=Path, help="program file (.fl)")
        if expression:
            p.add_argument("-e", "--expr", required=True, help="top-level expression")
            p.add_argument("--dot", type=Path, metavar="DIR", help="write DOT snapshots here")

    def evaluation(p):
        p.add_argument("--strategy", choices=STRATEGIES, default="bubbling")
        p.add_argument("--max-values", type=_positive, default=16, metavar="N")
        p.add_argument("--max-steps", type=_positive, default=100_000, metavar="N")
        p.add_argument("--validate", action="store_true", help="check the dominator attribute after every step")
        p.add_argument("--stats", action="store_true", help="print step and attribute-write counts")
        p.add_argument("--jobs", type=_positive, default=1, metavar="N")

    p = sub.add_parser("eval", help="print the values of an expression")
    common(p)
    evaluation(p)
    p.add_argument("--trace", action="store_true", help="stream step lines to stderr")

    p = sub.add_parser("trace", help="stream one line per step, then the values")
    common(p)
    evaluation(p)

    p = sub.add_parser("check", help="report LOIS diagnostics")
    common(p, expression=False)

    p = sub.add_parser("dominators", help="stored vs immediate dominator of every node")
    common(p)
    return ap


def _load(path: Path) -> Program:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_program(text)


def _dot_dir(path: Path | None) -> Path | None:
    if path is None:
        return None
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {path}: {exc.strerror or exc}") from None
    if not os.access(path, os.W_OK):
        raise UsageError(f"{path} is not writable")
    return path


def overhead(stats: Counter) -> float | None:
    """Attribute writes with dominators and predecessors over label+successor writes."""
    base = stats["labels"] + stats["successors"]
    if not base:
        return None
    return (base + stats["dominators"] + stats["predecessors"]) / base


def format_stats(stats: Counter) -> list[str]:
    keys = ("steps", "rewrites", "bubbles", "splits", "copies", "failures", "cloned", "duplicates")
    lines = ["-- " + " ".join(f"{k}={stats[k]}" for k in keys)]
    writes = ("nodes", "labels", "successors", "predecessors", "dominators")
    lines.append("-- writes " + " ".join(f"{k}={stats[k]}" for k in writes))
    ratio = overhead(stats)
    if ratio is not None:
        lines.append(f"-- attribute overhead {ratio:.3f}")
    return lines


def _evaluate(args, out, err, streaming: bool) -> int:
    program = _load(args.program)
    if not program.is_lois:
        for d in program.diagnostics:
            print(f"{args.program}:{d}", file=err)
        return EXIT_FAIL
    g = to_graph(parse_expr(args.expr, program), program)
    sink = None
    if streaming:
        sink = lambda line: print(line, file=out, flush=True)  # noqa: E731
    elif args.trace:
        sink = lambda line: print(line, file=err)  # noqa: E731
    cfg = EvalConfig(
        strategy=args.strategy,
        max_values=args.max_values,
        max_steps=args.max_steps,
        validate=args.validate,
        trace=sink,
        dot_dir=_dot_dir(args.dot),
        jobs=args.jobs,
    )
    ev = Evaluator(program, cfg)
    try:
        vs = ev.compute_values(g)
    except UnsoundAttribute as exc:
        print(f"bubbly: {exc}", file=err)
        return EXIT_FAIL
    for v in vs:
        print(v, file=out)
    print(
        f"-- values={len(vs)} steps={vs.stats['steps']} clones={vs.stats['cloned']} "
        f"exhausted={'yes' if vs.exhausted else 'no'}",
        file=out,
    )
    if args.stats:
        for line in format_stats(vs.stats):
            print(line, file=out)
    return EXIT_FAIL if vs.exhausted and not len(vs) else EXIT_OK


def _check(args, out, err) -> int:
    program = _load(args.program)
    for d in program.diagnostics:
        print(f"{args.program}:{d}", file=out)
    if program.diagnostics:
        return EXIT_FAIL
    rules = sum(len(rs) for rs in program.rules.values())
    print(f"ok: {len(program.rules)} operations, {rules} rules, LOIS", file=out)
    return EXIT_OK


def _dominators(args, out, err) -> int:
    program = _load(args.program)
    g = to_graph(parse_expr(args.expr, program), program)
    report = validate_attribute(g)
    rows = [("node", "label", "stored", "immediate", "sound")]
    for e in report.entries:
        rows.append(
            (str(e.node), g.label(e.node).name, str(e.stored), str(e.immediate), "yes" if e.sound else "NO")
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=out)
    print(f"-- root {g.root} ({g.label(g.root).name})", file=out)
    dot = _dot_dir(args.dot)
    if dot is not None:
        (dot / "graph.dot").write_text(g.to_dot("graph"))
    return EXIT_OK if report.ok else EXIT_FAIL


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    # Term depth drives recursion in demand search and printing.
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    try:
        if args.command == "check":
            return _check(args, out, err)
        if args.command == "dominators":
            return _dominators(args, out, err)
        return _evaluate(args, out, err, streaming=args.command == "trace")
    except (UsageError, LangError) as exc:
        print(f"bubbly: {exc}", file=err)
        return EXIT_USAGE
    except GraphError as exc:
        print(f"bubbly: {exc}", file=err)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
