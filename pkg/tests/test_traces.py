import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from valence.graph_core import make_graph, neg, pos
from valence.traces import (ContractError, OracleCapExceeded, ReduciblePair, _codec, _nf_codes, _nf_extend,
                            canonical_linearization, dependence_graph, is_identity, normal_form,
                            normal_form_slow, oracle_is_identity, reduce_fully, reduce_once, reducible_pairs,
                            trace_equal)

from strategies import graph_and_word, graphs

a, abar = pos("v"), neg("v")
aw, awbar = pos("w"), neg("w")
VW = make_graph(["v", "w"], edges=[("v", "w")])


def test_dependence_graph_examples(B, Z):
    assert len(dependence_graph(B, ())) == 0
    d = dependence_graph(B, (a, abar))
    assert d.arcs == {(1, 2)}
    assert dependence_graph(Z, (a, abar)).arcs == frozenset()


def test_reducible_pairs_examples(B):
    assert reducible_pairs(dependence_graph(B, (a, abar))) == [ReduciblePair(1, 2)]
    assert reducible_pairs(dependence_graph(B, (abar, a))) == []
    assert reducible_pairs(dependence_graph(VW, (a, aw, abar))) == [ReduciblePair(1, 3)]


def test_reduce_once_examples(B):
    assert len(reduce_once(dependence_graph(B, (a, abar)), ReduciblePair(1, 2))) == 0
    d = reduce_once(dependence_graph(B, (a, a, abar, abar)), ReduciblePair(2, 3))
    assert d.alive_word() == (a, abar)
    d = reduce_once(dependence_graph(VW, (a, aw, abar)), ReduciblePair(1, 3))
    assert d.alive_word() == (aw,)
    with pytest.raises(ContractError):
        reduce_once(dependence_graph(B, (abar, a)), ReduciblePair(2, 1))


def test_normal_form_examples(B, Z):
    assert normal_form(B, (a, a, abar, abar)) == ()
    assert tuple(normal_form(B, (abar, a))) == (abar, a)
    assert normal_form(Z, (abar, a)) == ()


def test_identity_examples(B):
    assert is_identity(B, (a, abar))
    assert not is_identity(B, (abar, a))
    assert is_identity(VW, (a, aw, abar, awbar))


def test_oracle_examples(B):
    assert oracle_is_identity(B, ())
    assert oracle_is_identity(B, (a, abar))
    assert not oracle_is_identity(B, (a, abar, a))
    with pytest.raises(OracleCapExceeded):
        oracle_is_identity(B, (a, abar) * 7)


def test_trace_equal_examples(B):
    assert trace_equal(B, (a, abar, a), (a,))
    assert trace_equal(VW, (a, aw), (aw, a))
    assert not trace_equal(B, (a,), (abar,))


@given(graph_and_word())
def test_dependence_graph_invariants(gw):
    g, w = gw
    d = dependence_graph(g, w)
    assert len(d) == len(w)
    for i in range(1, len(w) + 1):
        for j in range(i + 1, len(w) + 1):
            assert ((i, j) in d.arcs) == (not g.independent(w[i - 1], w[j - 1]))


@given(graph_and_word(max_len=10))
def test_normal_form_idempotent_and_parity(gw):
    g, w = gw
    nf = tuple(normal_form(g, w))
    assert tuple(normal_form(g, nf)) == nf
    assert len(w) >= len(nf) and (len(w) - len(nf)) % 2 == 0


@given(graph_and_word(max_len=10), st.randoms(use_true_random=False))
def test_random_orders_agree(gw, rnd):
    g, w = gw
    d = dependence_graph(g, w)
    forms = {canonical_linearization(g, reduce_fully(d, random.Random(rnd.random()))) for _ in range(10)}
    assert forms == {tuple(normal_form(g, w))}


@given(graph_and_word(max_len=8))
def test_fast_and_slow_normal_forms_agree(gw):
    g, w = gw
    assert tuple(normal_form(g, w)) == tuple(normal_form_slow(g, w))


@given(graphs(4), st.data())
def test_congruence(g, data):
    x = data.draw(st.lists(st.sampled_from(g.alphabet()), max_size=4).map(tuple))
    y = data.draw(st.lists(st.sampled_from(g.alphabet()), max_size=4).map(tuple))
    u = data.draw(st.lists(st.sampled_from(g.alphabet()), max_size=6).map(tuple))
    if is_identity(g, u):
        assert trace_equal(g, x + u + y, x + y)


@given(graph_and_word(max_len=8))
def test_identity_matches_oracle(gw):
    g, w = gw
    assert is_identity(g, w) == oracle_is_identity(g, w)


def test_identity_matches_oracle_exhaustive_small():
    g = make_graph(["v", "w"], looped=["w"], edges=[("v", "w")])
    for n in range(7):
        for w in product(g.alphabet(), repeat=n):
            assert is_identity(g, w) == oracle_is_identity(g, w)


@given(graphs(4), st.data())
def test_incremental_normal_form(g, data):
    cd = _codec(g)
    k = len(cd.symbols)
    w1 = data.draw(st.lists(st.integers(0, k - 1), max_size=8))
    w2 = data.draw(st.lists(st.integers(0, k - 1), max_size=8))
    nf = _nf_codes(cd, w1)
    assert _nf_extend(cd, nf, w2) == _nf_codes(cd, nf + w2)


@given(graph_and_word(max_vertices=3, max_len=5))
def test_unmatched_bar_is_permanent(gw):
    # an unlooped ā left in a normal form can never cancel later, whatever is appended
    g, w = gw
    nf = tuple(normal_form(g, w))
    if not any(not x.positive and not g.is_looped(x.vertex) for x in nf):
        return
    for n in range(4):
        for ext in product(g.alphabet(), repeat=n):
            assert normal_form(g, nf + ext)
