import random

import pytest
from hypothesis import given, settings, strategies as st

from bubbly.dominance import (
    chain_meet,
    dominates,
    dominator_sets,
    immediate_dominator,
    initialize,
    validate_attribute,
)
from bubbly.graph import Graph, GraphError, Kind, Symbol
from bubbly.randgen import random_attribute, random_dag

from oracles import dominates_by_paths

A = Symbol("A", Kind.CONSTRUCTOR, 0)
F = Symbol("f", Kind.OPERATION, 1)
G = Symbol("g", Kind.OPERATION, 2)


def by_label(g, name):
    (n,) = [n for n in g if g.label(n).name == name]
    return n


def diamond():
    g = Graph()
    n = g.add_node(A)
    a = g.add_node(F, [n])
    b = g.add_node(F, [n])
    root = g.add_node(G, [a, b])
    g.set_root(root)
    initialize(g)
    return g, root, a, b, n


def test_slash_dominates_choice(bmi_graph):
    assert dominates(bmi_graph, by_label(bmi_graph, "/"), by_label(bmi_graph, "?"))
    assert immediate_dominator(bmi_graph, by_label(bmi_graph, "?")) == by_label(bmi_graph, "/")


def test_chain_idom_is_parent():
    g = Graph()
    b = g.add_node(A)
    a = g.add_node(F, [b])
    root = g.add_node(F, [a])
    g.set_root(root)
    assert immediate_dominator(g, b) == a
    assert immediate_dominator(g, a) == root


def test_diamond_join_is_dominated_by_root():
    g, root, a, b, n = diamond()
    assert immediate_dominator(g, n) == root
    assert not dominates(g, a, n) and not dominates(g, b, n)


def test_root_has_no_immediate_dominator():
    g, root, *_ = diamond()
    with pytest.raises(GraphError):
        immediate_dominator(g, root)


def test_dominance_is_proper():
    g, root, *_ = diamond()
    assert not dominates(g, root, root)


def test_unknown_node_is_an_error():
    g, *_ = diamond()
    with pytest.raises(GraphError):
        dominates(g, 0, 42)


def test_initialized_attribute_validates(bmi_graph):
    report = validate_attribute(bmi_graph)
    assert report.ok and report.immediate_count == len(bmi_graph) - 1


def test_corrupted_attribute_is_flagged(bmi_graph):
    q = by_label(bmi_graph, "?")
    wrong = next(n for n in bmi_graph if n != q and not dominates(bmi_graph, n, q))
    bmi_graph.set_dominator(q, wrong)
    report = validate_attribute(bmi_graph)
    assert not report.ok
    assert [e.node for e in report.failures] == [q]


def test_chain_meet_of_diamond_branches_is_root():
    g, root, a, b, _ = diamond()
    m = chain_meet(g, a, b)
    assert m == root
    assert dominates(g, m, a) and dominates(g, m, b)


def test_chain_meet_of_node_with_its_ancestor():
    g, root, a, b, n = diamond()
    assert chain_meet(g, n, root) == root
    assert chain_meet(g, a, a) == a


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_dominates_agrees_with_path_enumeration(seed):
    g = random_dag(random.Random(seed), size=12)
    for d in g:
        for n in g:
            assert dominates(g, d, n) == dominates_by_paths(g, d, n)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_immediate_dominator_is_closest(seed):
    g = random_dag(random.Random(seed), size=16)
    doms = dominator_sets(g)
    for n in g:
        if n == g.root:
            continue
        i = immediate_dominator(g, n)
        assert dominates(g, i, n)
        assert all(d == i or dominates(g, d, i) for d in doms[n])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_dominance_is_antisymmetric_and_transitive(seed):
    g = random_dag(random.Random(seed), size=14)
    doms = dominator_sets(g)
    for n in g:
        for d in doms[n]:
            assert n not in doms[d]
            assert doms[d] <= doms[n]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_chain_meet_dominates_both(seed):
    rng = random.Random(seed)
    g = random_dag(rng, size=16)
    random_attribute(rng, g)
    nodes = list(g)
    for _ in range(10):
        a, b = rng.choice(nodes), rng.choice(nodes)
        m = chain_meet(g, a, b)
        assert m == a or dominates(g, m, a)
        assert m == b or dominates(g, m, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_sound_attribute_validates(seed):
    rng = random.Random(seed)
    g = random_dag(rng, size=16)
    random_attribute(rng, g)
    assert validate_attribute(g).ok
