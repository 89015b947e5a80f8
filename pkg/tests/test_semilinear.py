from itertools import product

import pytest
from hypothesis import given, strategies as st

from valence import corpus
from valence.automata import enumerate_language
from valence.semilinear import (INTEGERS, LinearSet, Multiset, SemilinearError, SemilinearSet, WeightMap,
                                box_equal, empty_set, linear, multisets_up_to, parikh, parikh_of_nfa,
                                preimage_semilinear, singleton, sl_member, sl_sum, sl_union, small_preimage,
                                vadd, vsub)
from valence.automata import ValenceAutomaton
from valence.graph_core import make_graph


def test_parikh_examples():
    assert len(parikh("", ("a", "b"))) == 0
    assert parikh("abab").as_dict() == {"a": 2, "b": 2}
    assert parikh("aab").as_dict() == {"a": 2, "b": 1}


def test_sum_examples():
    S = linear((1, 0), [(2, 1)])
    assert sl_sum(S, singleton((0, 0))) == S
    assert sl_sum(S, singleton((0, 1))) == linear((1, 1), [(2, 1)])
    assert sl_sum(singleton((1,)), singleton((2,))) == singleton((3,))
    with pytest.raises(SemilinearError):
        sl_sum(singleton((1,)), singleton((1, 2)))


def test_union_examples():
    S = linear((1, 0), [(2, 1)])
    assert sl_union(S, empty_set(2)) == S
    U = sl_union(singleton((1,)), singleton((2,)))
    assert sl_member(U, (1,)) and sl_member(U, (2,)) and not sl_member(U, (3,))


def test_member_examples():
    S = linear((1, 0), [(2, 1)])
    assert sl_member(S, (5, 2))
    # oracle: the only candidates are t = 0, 1, 2
    assert not any((1 + 2 * t, t) == (4, 2) for t in range(3))
    assert not sl_member(S, (4, 2))
    assert not sl_member(empty_set(2), (0, 0))


def test_integer_membership_refuses_unbounded_sets():
    # periods of both signs in one coordinate: no coefficient bound is derivable
    S = SemilinearSet(1, (LinearSet((0,), ((2,), (-3,)), INTEGERS),), INTEGERS)
    with pytest.raises(SemilinearError):
        sl_member(S, (1,))
    bounded = SemilinearSet(1, (LinearSet((0,), ((2,),), INTEGERS),), INTEGERS)
    assert sl_member(bounded, (4,)) and not sl_member(bounded, (3,)) and not sl_member(bounded, (-2,))


def _nfa(edges, finals, states=("q0", "q1")):
    return ValenceAutomaton(make_graph([]), ("a", "b"), states, "q0", frozenset(finals),
                            tuple((s, x, (), t) for s, x, t in edges))


def test_parikh_of_nfa_examples():
    ab_star = _nfa([("q0", "a", "q1"), ("q1", "b", "q0")], {"q0"})
    assert box_equal(parikh_of_nfa(ab_star), linear((0, 0), [(1, 1)]), 6)
    lam = _nfa([], {"q0"})
    assert box_equal(parikh_of_nfa(lam), singleton((0, 0)), 4)
    a_bb = _nfa([("q0", "a", "q1"), ("q1", "b", "q2"), ("q2", "b", "q1")], {"q1"}, ("q0", "q1", "q2"))
    S = parikh_of_nfa(a_bb)
    seen = {parikh(w, ("a", "b")).counts for w in enumerate_language(a_bb, 9)}
    for v in multisets_up_to(2, 9):
        assert sl_member(S, v) == (v in seen)
    assert box_equal(S, linear((1, 0), [(0, 2)]), 9)


def _plain_machines():
    for name in corpus.machine_names():
        A = corpus.machine(name)
        if all(not e.monoid for e in A.edges):
            yield name, A


@pytest.mark.parametrize("name", [n for n, _ in _plain_machines()])
def test_parikh_of_corpus_nfas(name):
    A = corpus.machine(name)
    S = parikh_of_nfa(A)
    words = enumerate_language(A, 9, 32)
    seen = {parikh(w, A.input_alphabet).counts for w in words}
    for v in multisets_up_to(len(A.input_alphabet), 9):
        assert sl_member(S, v) == (v in seen)


def _preimage_oracle(weights, n, box):
    return {v for v in product(range(box + 1), repeat=len(weights))
            if sum(w * c for w, c in zip(weights, v)) == n}


def test_preimage_examples():
    phi = WeightMap(("x", "y"), (2, -3))
    K = preimage_semilinear(phi, 0)
    # exhaustive enumeration of μ with |μ| ≤ 12
    sols = {v for v in multisets_up_to(2, 12) if 2 * v[0] - 3 * v[1] == 0}
    assert sols == {(3 * t, 2 * t) for t in range(3)}
    for v in multisets_up_to(2, 12):
        assert sl_member(K, v) == (v in sols)
    assert box_equal(preimage_semilinear(WeightMap(("x",), (1,)), 5), singleton((5,)), 10)
    K = preimage_semilinear(WeightMap(("x", "y"), (1, -1)), 0)
    for v in multisets_up_to(2, 12):
        assert sl_member(K, v) == (v[0] == v[1])


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=3), st.integers(-6, 6))
def test_preimage_matches_direct_evaluation(weights, n):
    phi = WeightMap(tuple(f"x{i}" for i in range(len(weights))), tuple(weights))
    S = preimage_semilinear(phi, n)
    box = 8 if len(weights) <= 2 else 5
    sols = _preimage_oracle(weights, n, box)
    for v in product(range(box + 1), repeat=len(weights)):
        assert sl_member(S, v) == (v in sols)


def test_small_preimage_examples():
    phi = WeightMap(("x", "y"), (2, -3))
    assert small_preimage(phi, Multiset(("x", "y"), (1, 0))) == Multiset(("x", "y"), (1, 0))
    mu = Multiset(("x", "y"), (3, 2))
    assert len(small_preimage(phi, mu)) == 0
    assert sl_member(preimage_semilinear(phi, 0), mu.counts)


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(0, 20)), min_size=1, max_size=4))
def test_small_preimage_bound(spec):
    alphabet = tuple(f"x{i}" for i in range(len(spec)))
    phi = WeightMap(alphabet, tuple(w for w, _ in spec))
    mu = Multiset(alphabet, tuple(c for _, c in spec))
    nu = small_preimage(phi, mu)
    assert nu.divides(mu)
    assert phi(nu) == phi(mu)
    assert len(nu) <= (phi.m + 2) * abs(phi(mu))
    if phi(mu) == 0:
        assert len(nu) == 0


vec2 = st.tuples(st.integers(0, 3), st.integers(0, 3))
lin2 = st.builds(lambda b, ps: LinearSet(b, tuple(p for p in ps if any(p))), vec2, st.lists(vec2, max_size=2))
sl2 = st.lists(lin2, max_size=2).map(lambda parts: SemilinearSet(2, tuple(parts)))


@given(sl2, sl2)
def test_sum_and_union_membership_laws(S, T):
    box = 7
    sum_set = sl_sum(S, T)
    union = sl_union(S, T)
    s_elems = {v for v in product(range(box + 1), repeat=2) if sl_member(S, v)}
    for v in product(range(box + 1), repeat=2):
        expect = any(all(x >= 0 for x in vsub(v, s)) and sl_member(T, vsub(v, s)) for s in s_elems)
        assert sl_member(sum_set, v) == expect
        assert sl_member(union, v) == (sl_member(S, v) or sl_member(T, v))
        assert sl_member(sl_union(S, S), v) == sl_member(S, v)
