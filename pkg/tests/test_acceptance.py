"""One test per acceptance criterion; each records a single PASS/FAIL line."""

import random
import time
from collections import Counter

from bubbly.bubbling import BubbleStats, bubble
from bubbly.cli import overhead
from bubbly.dominance import immediate_dominator, validate_attribute
from bubbly.evaluator import EvalConfig, compute_values
from bubbly.graph import extract_alternative
from bubbly.lang import graph_of, parse_program
from bubbly.randgen import random_attribute, random_dag, random_expression, random_program, seed_from_env
from bubbly.rewrite import Match, match_rule, rewrite_at

from conftest import CORPUS, CORPUS_CASES, BMI_EXPR, load
from oracles import build, literal_bubble

RESULTS = []


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def by_label(g, name):
    return sorted(n for n in g if g.label(n).name == name)


def expected_bubbled_bmi(p):
    """The expected graph after one bubble on the bmi graph, built by hand."""
    s = p.symbol
    nodes = {
        "alice": (s("Alice"), []),
        "bob": (s("Bob"), []),
        "pb": (s("parent"), ["bob"]),
        "two": (s("2"), []),
        "lit": (s("25"), []),
        "r": (s("?"), ["lslash", "rslash"]),
        "top": (s(">"), ["r", "lit"]),
    }
    for side, alt in (("l", "alice"), ("r", "pb")):
        nodes[side + "w"] = (s("weight"), [alt])
        nodes[side + "h"] = (s("height"), [alt])
        nodes[side + "pow"] = (s("^"), [side + "h", "two"])
        nodes[side + "slash"] = (s("/"), [side + "w", side + "pow"])
    return build(nodes, "top")


def test_criterion_1_bmi_golden_bubble(bmi):
    t0 = time.perf_counter()
    g = graph_of(BMI_EXPR, bmi)
    (c,) = by_label(g, "?")
    bubble(g, c)
    valid = validate_attribute(g).ok and not g.problems()
    same = g.isomorphic(expected_bubbled_bmi(bmi))
    elapsed = time.perf_counter() - t0
    ok = valid and same and elapsed < 1.0
    report(1, ok, f"isomorphic={same} attribute-valid={valid} runtime={elapsed * 1000:.1f}ms (<1s)")
    assert ok


def test_criterion_2_collapsing_example():
    p = parse_program("f x y = h y\ng x = x\nh x = x")
    g = graph_of("f (g z) (g z) where z = 0", p)
    rule = p.rules["f"][0]
    rewrite_at(g, g.root, rule, match_rule(g, g.root, rule))
    (h,) = by_label(g, "h")
    (gn,) = by_label(g, "g")
    (zero,) = by_label(g, "0")
    shape = g.root == h and g.successors(h) == (gn,) and g.successors(gn) == (zero,)
    stored, idom = g.dominator(zero), immediate_dominator(g, zero)
    sound = validate_attribute(g).ok
    ok = shape and stored == h and idom == gn and sound
    report(
        2,
        ok,
        f"result h (g 0)={shape} D(0)={g.label(stored).name} immediate={g.label(idom).name} sound={sound}",
    )
    assert ok


def _redexes(p, g):
    out = []
    for n in g:
        sym = g.label(n)
        if sym.is_operation and sym.name in p.rules:
            for r in p.rules[sym.name]:
                m = match_rule(g, n, r)
                if isinstance(m, Match):
                    out.append((n, r, m))
    return out


def test_criterion_3_rewrites_keep_attribute_sound():
    rng = random.Random(seed_from_env(3))
    t0 = time.perf_counter()
    trials = rewrites = failures = largest = 0
    while trials < 1000:
        p = parse_program(random_program(rng))
        ops = {n: s.arity for n, s in p.operations.items() if n in p.rules}
        g = graph_of(random_expression(rng, ops), p)
        did = 0
        for _ in range(12):
            if len(g) > 30:
                break
            largest = max(largest, len(g))
            moves = [("rewrite", x) for x in _redexes(p, g)]
            moves += [("bubble", n) for n in g if g.label(n).is_choice and n != g.root]
            if g.label(g.root).is_choice:
                moves.append(("split", None))
            if not moves:
                break
            kind, x = rng.choice(moves)
            if kind == "rewrite":
                rewrite_at(g, *x)
                rewrites += 1
                did += 1
            elif kind == "bubble":
                bubble(g, x)
            else:
                g = extract_alternative(g, rng.randrange(2))
            if not validate_attribute(g).ok or g.problems():
                failures += 1
                break
        trials += did > 0
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    report(
        3,
        ok,
        f"trials={trials} rewrites={rewrites} failures={failures} max-nodes={largest} runtime={elapsed:.1f}s (<60s)",
    )
    assert ok


def test_criterion_4_bubbles_match_literal_construction():
    rng = random.Random(seed_from_env(4))
    t0 = time.perf_counter()
    unsound = mismatched = 0
    trials = 1000
    for _ in range(trials):
        g = random_dag(rng, size=rng.randint(4, 15))
        random_attribute(rng, g)
        c = rng.choice([n for n in g if g.label(n).is_choice and n != g.root])
        want = literal_bubble(g, c, g.dominator(c))
        bubble(g, c)
        unsound += not validate_attribute(g).ok or bool(g.problems())
        mismatched += not g.isomorphic(want)
    elapsed = time.perf_counter() - t0
    ok = unsound == 0 and mismatched == 0 and elapsed < 60
    report(
        4,
        ok,
        f"trials={trials} unsound={unsound} non-isomorphic={mismatched} runtime={elapsed:.1f}s (<60s)",
    )
    assert ok


def test_criterion_5_strategy_differential():
    programs = set()
    compared = differ = 0
    for name, expr in CORPUS_CASES:
        p = load(name)
        a = compute_values(p, graph_of(expr, p), EvalConfig(max_steps=100_000))
        b = compute_values(p, graph_of(expr, p), EvalConfig(strategy="copying", max_steps=100_000))
        if a.exhausted and b.exhausted:
            compared += 1
            programs.add(name)
            differ += a.as_set() != b.as_set()
    ok = differ == 0 and len(programs) >= 10
    report(5, ok, f"programs={len(programs)} expressions={compared} differing={differ}")
    assert ok


def test_criterion_6_loop_or_42():
    vs = compute_values(load("loop"), graph_of("loop ? 42", load("loop")), EvalConfig(max_steps=200))
    ok = "42" in vs and vs.stats["steps"] <= 200
    report(6, ok, f"values={sorted(vs)} steps={vs.stats['steps']} (budget 200)")
    assert ok


def test_criterion_7_bubble_locality():
    p = parse_program((CORPUS / "bmi.fl").read_text() + "\nwrap x = x\n")
    counts = {}
    for k in (0, 10, 100):
        text = "weight x / (height x) ^ 2 > 25"
        for _ in range(k):
            text = f"wrap ({text})"
        g = graph_of(text + " where x = Alice ? parent Bob", p)
        (c,) = by_label(g, "?")
        with g.track() as seen:
            bubble(g, c)
        counts[k] = (len(seen), len(g))
    touched = {k: v[0] for k, v in counts.items()}
    ok = len(set(touched.values())) == 1
    sizes = {k: v[1] for k, v in counts.items()}
    report(7, ok, f"touched nodes per k={touched} graph sizes={sizes}")
    assert ok


def test_criterion_8_clone_accounting(bmi):
    g = graph_of(BMI_EXPR, bmi)
    before = set(g)
    (c,) = by_label(g, "?")
    stats = BubbleStats(c, g.dominator(c))
    bubble(g, c, stats=stats)
    fresh = len(set(g) - before)
    ok = stats.surviving_fresh == fresh == 9
    report(8, ok, f"surviving fresh nodes={fresh} BubbleStats={stats.surviving_fresh} expected=9")
    assert ok


def test_criterion_9_overhead_reported():
    total = Counter()
    for name, expr in CORPUS_CASES:
        p = load(name)
        total.update(compute_values(p, graph_of(expr, p)).stats)
    ratio = overhead(total)
    report(
        9,
        ratio is not None,
        f"reported only: rewrites={total['rewrites']} bubbles={total['bubbles']} "
        f"label+successor writes={total['labels'] + total['successors']} "
        f"dominator writes={total['dominators']} predecessor writes={total['predecessors']} "
        f"attribute overhead={ratio:.3f}",
    )
    assert ratio is not None
