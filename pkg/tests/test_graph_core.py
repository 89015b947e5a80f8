import pytest
from hypothesis import given

from valence.graph_core import (GraphError, formal_inverse, independence_relation, make_graph, neg,
                                parse_graph, parse_word, pos, serialize_graph, thue_relations)
from valence.traces import is_identity, oracle_is_identity

from strategies import graphs


def test_single_looped_vertex_parses():
    g = parse_graph("vertex v looped\n")
    assert g.vertices == ("v",) and g.is_looped("v") and not g.edges


def test_three_blind_counters_file(corpus_root):
    g = parse_graph((corpus_root / "graphs" / "z3.graph").read_text())
    assert all(g.is_looped(v) for v in g.vertices)
    assert len(g.edges) == 3


@pytest.mark.parametrize("text", [
    "vertex u\nedge u w\n",
    "vertex u\nvertex u\n",
    "vertex u\nedge u u\n",
    "vertex u extra words\n",
    "node u\n",
])
def test_parse_errors_name_the_line(text):
    with pytest.raises(GraphError, match="line"):
        parse_graph(text)


def test_relations_of_B():
    rules = thue_relations(make_graph(["v"]))
    assert {(r.lhs, r.rhs, r.kind) for r in rules} == {((pos("v"), neg("v")), (), "cancellation")}


def test_relations_of_Z():
    rules = {(r.lhs, r.rhs) for r in thue_relations(make_graph(["v"], looped=["v"]))}
    a, abar = pos("v"), neg("v")
    assert rules == {((a, abar), ()), ((a, abar), (abar, a)), ((abar, a), (a, abar))}


def test_anticlique_has_no_commutations():
    rules = thue_relations(make_graph(["u", "w"]))
    assert len(rules) == 2 and all(r.kind == "cancellation" for r in rules)


def test_independence_examples():
    assert independence_relation(make_graph(["u", "w", "x"])) == set()
    assert independence_relation(make_graph(["v"], looped=["v"])) == {frozenset((pos("v"), neg("v")))}
    I = independence_relation(make_graph(["v", "w"], edges=[("v", "w")]))
    assert I == {frozenset((x, y)) for x in (pos("v"), neg("v")) for y in (pos("w"), neg("w"))}


@given(graphs(6))
def test_relation_counts(g):
    rules = thue_relations(g)
    cancel = [r for r in rules if r.kind == "cancellation"]
    comm = [r for r in rules if r.kind == "commutation"]
    assert len(cancel) == len(g.vertices)
    assert len(comm) == 8 * len(g.edges) + 2 * len(g.looped)


@given(graphs(6))
def test_independence_symmetric_irreflexive(g):
    for pair in independence_relation(g):
        assert len(pair) == 2
        x, y = tuple(pair)
        assert g.independent(x, y) and g.independent(y, x)
    for x in g.alphabet():
        assert not g.independent(x, x)


@given(graphs(6))
def test_serialize_round_trip(g):
    h = parse_graph(serialize_graph(g))
    assert h.vertices == g.vertices and h.looped == g.looped and h.edges == g.edges


def test_formal_inverse_examples():
    assert formal_inverse((pos("v"), pos("w"))) == (neg("w"), neg("v"))
    assert formal_inverse(()) == ()
    g = make_graph(["v"])
    w = (neg("v"),)
    assert formal_inverse(w) == (pos("v"),)
    assert not is_identity(g, w + formal_inverse(w))
    assert not oracle_is_identity(g, w + formal_inverse(w))


@given(graphs(4))
def test_formal_inverse_cancels_positive_words(g):
    w = tuple(pos(v) for v in g.vertices) + tuple(x for x in g.alphabet() if g.is_looped(x.vertex))
    assert is_identity(g, w + formal_inverse(w))


def test_word_syntax():
    assert parse_word("@") == ()
    assert parse_word("+v -w") == (pos("v"), neg("w"))
    with pytest.raises(ValueError):
        parse_word("v")
