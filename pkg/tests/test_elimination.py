import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from valence import corpus
from valence.automata import RationalLabel, parse_automaton, ValenceAutomaton, all_words, enumerate_language
from valence.graph_core import GenSymbol, make_graph
from valence.lambda_elim import (ClassificationError, decompose, eliminate_lambda, eliminate_lambda_B,
                                 eliminate_lambda_free_B, eliminate_lambda_times_Z, eliminate_to_transducer,
                                 rat_normal_B)
from valence.lambda_elim import slalg
from valence.lambda_elim.eliminate import _eliminate
from valence.lambda_elim.free_b import c_set
from valence.lambda_elim.stack import deep, prepare
from valence.lambda_elim.transducer import VTransducer
from valence.semilinear import sl_member, vadd

BUDGET = 32  # λ-edges per run when enumerating an input machine


def same_language(A, B, maxlen):
    return enumerate_language(B, maxlen) == enumerate_language(A, maxlen, BUDGET)


# -- the dispatcher and the three constructions ----------------------------------

def test_B_lambda_free_input_unchanged():
    A = corpus.machine("anbn")
    B = eliminate_lambda_B(A)
    assert B.lambda_free and same_language(A, B, 8)


def test_B_lambda_preamble():
    A = corpus.machine("b_anbn_pre")
    B = eliminate_lambda_B(A)
    assert B.lambda_free
    assert enumerate_language(B, 8) == {"a" * n + "b" * n for n in range(5)}


def test_B_lambda_only():
    B = eliminate_lambda_B(corpus.machine("b_lambda_only"))
    assert B.lambda_free and enumerate_language(B, 8) == {""}


def test_B_needs_one_unlooped_vertex():
    with pytest.raises(ValueError):
        eliminate_lambda_B(corpus.machine("z_eqcount"))


def test_times_Z_eqcount():
    A = corpus.machine("z_eqcount")
    B = eliminate_lambda_times_Z(A, ())
    assert B.lambda_free
    assert enumerate_language(B, 8) == {w for w in all_words("ab", 8) if w.count("a") == w.count("b")}


def test_times_Z_lambda_free_input():
    A = corpus.machine("z2_lf")
    B = eliminate_lambda_times_Z(A, decompose(A.graph).inner)
    assert B.lambda_free and same_language(A, B, 8)


def test_times_Z_empty_language():
    B = eliminate_lambda_times_Z(corpus.machine("z_empty"), ())
    assert B.lambda_free and enumerate_language(B, 8) == set()


def test_free_B_palindromes():
    A = corpus.machine("bb_pal")
    B = eliminate_lambda_free_B(A, decompose(A.graph).inner)
    assert B.lambda_free
    assert enumerate_language(B, 6) == {w for w in all_words("ab", 6) if len(w) % 2 == 0 and w == w[::-1]}


def test_free_B_lambda_free_input():
    A = corpus.machine("bb_odd_pal")
    B = eliminate_lambda_free_B(A, decompose(A.graph).inner)
    assert B.lambda_free and same_language(A, B, 6)


def test_free_B_lambda_cycle():
    B = eliminate_lambda_free_B(corpus.machine("bb_lambda_only"), decompose(corpus.graph("bb")).inner)
    assert B.lambda_free and enumerate_language(B, 6) == {""}


def test_free_B_refuses_trivial_inner_monoid():
    with pytest.raises(ValueError):
        eliminate_lambda_free_B(corpus.machine("anbn"), ())


def test_trivial_monoid():
    A = corpus.machine("empty_nfa")
    B = eliminate_lambda(A.graph, A)
    assert B.lambda_free and same_language(A, B, 8)


def test_outside_C_reports_witness():
    A = corpus.machine("l1")
    with pytest.raises(ClassificationError):
        eliminate_lambda(A.graph, A)
    g = corpus.graph("p4")
    A = ValenceAutomaton(g, ("a",), ("q",), "q", frozenset({"q"}), ())
    with pytest.raises(ClassificationError) as exc:
        eliminate_lambda(g, A)
    assert exc.value.witness == ("u", "x", "y", "v")


PLAIN = ["z_anbm_le", "z_empty", "z_eqcount", "z_lambda_only", "z2_abc", "z2_transfer", "z2_lf", "b_anbm_le",
         "b_anbn_pre", "b_dyck", "b_lambda_only", "anbn", "bz_abc", "bz_transfer", "empty_nfa"]
STACK = ["bb_pal", "bb_dyck2", "bb_lambda_only", "bb_lambda_pop", "bb_noisy_pal", "bb_odd_pal", "bb_nested"]


@pytest.mark.parametrize("name", PLAIN)
def test_elimination_preserves_language(name):
    A = corpus.machine(name)
    B = eliminate_lambda(A.graph, A)
    assert B.lambda_free and same_language(A, B, 8 if len(A.input_alphabet) <= 2 else 7)


@pytest.mark.parametrize("name", STACK)
def test_stack_elimination_preserves_language(name):
    A = corpus.machine(name)
    B = eliminate_lambda(A.graph, A)
    assert B.lambda_free and same_language(A, B, 6)


DOUBLE_PUSH = """alphabet a b
state q0 q1
initial q0
final q1
edge q0 q0 in=a mon=+p +p
edge q0 q1 in=@ mon=@
edge q1 q1 in=b mon=-p -p
"""


def test_stack_operations_present():
    # two outer pushes (pops) inside one letter make R-blocks (L-blocks) that split (merge)
    A = parse_automaton(DOUBLE_PUSH, corpus.graph("bb"))
    plan = decompose(A.graph)
    prep = prepare(VTransducer.from_automaton(A), plan, _eliminate)
    M = prep.machine
    kinds = {op.kind for op in M.loops_at(M.initial)}
    assert kinds == {"split", "merge", "cancel", "convert-to", "convert-from"}
    assert M.loops_at("nowhere") == []
    syms = list(M.symbols)
    for op in M.loops:
        assert deep(op, syms[:1]).kind == op.kind + "@"
        d = deep(op, syms[:2])
        assert d.kind == op.kind + "@@" and len(d.word) == len(op.word) + 4
    meta = eliminate_to_transducer(corpus.machine("bb_pal")).metadata
    assert meta["construction"] == "stack" and meta["operations"] > 0


# -- semilinear pieces against enumeration ------------------------------------------

vec = st.tuples(st.integers(1, 3), st.integers(0, 2), st.integers(0, 2))


@settings(max_examples=30)
@given(st.frozensets(vec, max_size=2), st.frozensets(vec, max_size=2), st.integers(-3, 3))
def test_c_set_matches_enumeration(Y, Z, i):
    S = c_set(Y, Z, i, 2)
    syms = sorted(Y) + sorted(Z)
    sign = [1] * len(Y) + [-1] * len(Z)
    cap = 12
    reached = {}
    for counts in product(range(cap + 1), repeat=len(syms)):
        shift = sum(s * c * y[0] for s, c, y in zip(sign, counts, syms))
        if shift == i:
            out = (0, 0)
            for c, y in zip(counts, syms):
                out = vadd(out, (c * y[1], c * y[2]))
            reached[out] = min(reached.get(out, cap), max(counts, default=0))
    for out, size in reached.items():
        if size <= 4:  # small witnesses: the set must contain them
            assert sl_member(S, out)
    for out in slalg.sample(S, 1):
        assert out in reached


def _paths_by_output(n, edges, steps, dim):
    """(u, v) -> outputs of well-bracketed paths of at most ``steps`` edges."""
    res: dict = {}
    front = {(u, u, (), (0,) * dim) for u in range(n)}
    seen = set(front)
    for _ in range(steps + 1):
        nxt = set()
        for u, cur, stack, out in front:
            if not stack:
                res.setdefault((u, cur), set()).add(out)
            for s, kind, typ, S, t in edges:
                if s != cur:
                    continue
                if kind == slalg.OPEN:
                    st2 = stack + (typ,)
                elif kind == slalg.CLOSE:
                    if not stack or stack[-1] != typ:
                        continue
                    st2 = stack[:-1]
                else:
                    st2 = stack
                item = (u, t, st2, vadd(out, S.parts[0].base))
                if item not in seen and len(st2) <= steps // 2:
                    seen.add(item)
                    nxt.add(item)
        front = nxt
    return res


@settings(max_examples=40)
@given(st.integers(1, 4), st.data())
def test_dyck_sums_match_path_enumeration(n, data):
    dim = 2
    kinds = st.sampled_from([slalg.OPEN, slalg.CLOSE, slalg.NEUTRAL])
    raw = data.draw(st.lists(st.tuples(st.integers(0, n - 1), kinds, st.integers(0, 1),
                                       st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(0, n - 1)),
                             min_size=1, max_size=6))
    edges = [(s, k, typ, slalg.point(o), t) for s, k, typ, o, t in raw]
    K = slalg.dyck_sums(range(n), edges, dim)
    short = _paths_by_output(n, edges, 8, dim)
    long = _paths_by_output(n, edges, 16, dim)
    assert set(short) <= set(K)
    for pair, outs in short.items():
        for o in outs:
            assert sl_member(K[pair], o)
    for pair, S in K.items():
        assert pair in long
        for o in slalg.sample(S, 1):
            if sum(o) <= 6:
                assert o in long[pair]


# -- rational normal form over B × C ------------------------------------------------

A_, Ab = GenSymbol("a", True), GenSymbol("a", False)


def values(S, steps):
    """(k, l, outputs) for elements āᵏaˡ × outputs spelled by accepting paths of ≤ ``steps`` transitions."""
    outs = S.outputs

    def app(v, x):
        k, l, c = v
        if isinstance(x, GenSymbol):
            if x.positive:
                return (k, l + 1, c)
            return (k, l - 1, c) if l else (k + 1, l, c)
        c = list(c)
        c[outs.index(x)] += 1
        return (k, l, tuple(c))

    start = (S.start, (0, 0, (0,) * len(outs)))
    seen = {start}
    front = {start}
    res = set()
    for _ in range(steps + 1):
        nxt = set()
        for q, v in front:
            if q in S.accept:
                res.add(v)
            for a, w, b in S.transitions:
                if a == q:
                    v2 = v
                    for x in w:
                        v2 = app(v2, x)
                    if (b, v2) not in seen:
                        seen.add((b, v2))
                        nxt.add((b, v2))
        front = nxt
    return res


def join(u, v):
    k, l, c = u
    k2, l2, c2 = v
    m = min(l, k2)
    return (k + k2 - m, l + l2 - m, tuple(a + b for a, b in zip(c, c2)))


def test_rat_normal_unit():
    S = RationalLabel((0,), 0, frozenset({0}), (), ("x",))
    T = rat_normal_B(S)
    assert len(T) == 1
    L, U, R = T[0]
    for part in (L, U, R):
        assert values(part, 4) == {(0, 0, (0,))}


def test_rat_normal_bar_then_a():
    S = RationalLabel((0, 1, 2), 0, frozenset({2}), ((0, (Ab, "x"), 1), (1, (A_,), 2)), ("x",))
    T = rat_normal_B(S)
    lefts = set().union(*(values(L, 6) for L, _, _ in T))
    rights = set().union(*(values(R, 6) for _, _, R in T))
    assert (1, 0, (1,)) in lefts and (0, 1, (0,)) in rights
    for L, U, R in T:
        assert all(l == 0 for _, l, _ in values(L, 8))
        assert values(U, 4) == {(0, 0, (0,))}
        assert all(k == 0 for k, _, _ in values(R, 8))
    got = {join(x, y) for L, _, R in T for x in values(L, 6) for y in values(R, 6)}
    assert got == values(S, 6)


def test_rat_normal_rejects_other_vertices():
    S = RationalLabel((0,), 0, frozenset({0}), ((0, (GenSymbol("p", True), GenSymbol("q", False)), 0),))
    with pytest.raises(ValueError):
        rat_normal_B(S)


@settings(max_examples=30)
@given(st.integers(1, 4), st.data())
def test_rat_normal_containment(n, data):
    letter = st.sampled_from([A_, Ab, "x"])
    trans = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.lists(letter, max_size=2).map(tuple),
                                         st.integers(0, n - 1)), min_size=1, max_size=7))
    S = RationalLabel(tuple(range(n)), 0, frozenset({data.draw(st.integers(0, n - 1))}), tuple(trans), ("x",))
    T = rat_normal_B(S)
    # a gadget step can stand for many steps of S, hence the wide bound on the other side
    big_rhs = {join(x, y) for L, _, R in T for x in values(L, 24) for y in values(R, 24)}
    assert values(S, 5) <= big_rhs
    small_rhs = {join(x, y) for L, _, R in T for x in values(L, 3) for y in values(R, 3)}
    assert small_rhs <= values(S, 24)
