import random

import pytest

from valence import corpus
from valence.automata import (ACCEPTED, NOT_WITHIN_BUDGET, AutomatonError, ValenceAutomaton, accepts_bounded,
                              accepts_by_runs, accepts_lambda_free, all_words, embed_free_copies,
                              enumerate_language, expand_rat_transducer, parse_automaton, rational_labeling,
                              serialize_automaton)
from valence.graph_core import make_graph, neg, pos
from valence.lower_bounds import l1_member
from valence.traces import is_identity

B = make_graph(["v"])
v, vbar = pos("v"), neg("v")
MACHINES = corpus.machine_names()
LAMBDA_FREE = [n for n in MACHINES if corpus.machine(n).lambda_free]


def machine(edges, finals, states=("q0", "q1", "q2"), g=B, alphabet=("a", "b")):
    return ValenceAutomaton(g, alphabet, states, "q0", frozenset(finals), tuple(edges))


def test_parse_minimal_machine():
    A = parse_automaton("state q\ninitial q\nfinal q\n", B)
    assert A.states == ("q",) and accepts_lambda_free(A, "")


def test_parse_round_trip(corpus_root):
    path = corpus_root / "machines" / "anbn.auto"
    A = corpus.machine("anbn")
    again = parse_automaton(serialize_automaton(A), base_dir=str(path.parent))
    assert again == A


def test_parse_errors():
    with pytest.raises(AutomatonError):
        parse_automaton("state q\nfinal q\n", B)
    with pytest.raises(ValueError):
        parse_automaton("state q\ninitial q\nedge q r in=@ mon=@\n", B)
    with pytest.raises(ValueError):
        parse_automaton("state q\ninitial q\nedge q q in=@ mon=+nope\n", B)


def test_anbn_examples():
    A = corpus.machine("anbn")
    assert accepts_lambda_free(A, "aabb") and accepts_by_runs(A, "aabb")
    assert not accepts_lambda_free(A, "aab") and not accepts_by_runs(A, "aab")
    assert enumerate_language(A, 6) == {"ab", "aabb", "aaabbb"}


def test_initial_final_accepts_empty_word():
    A = machine([("q0", "a", (v,), "q0")], {"q0"})
    assert accepts_lambda_free(A, "")
    assert accepts_bounded(A, "", 0) == ACCEPTED


def test_lambda_free_needs_lambda_free_machine():
    A = machine([("q0", "", (), "q1")], {"q1"})
    with pytest.raises(Exception):
        accepts_lambda_free(A, "")


@pytest.mark.parametrize("name", LAMBDA_FREE)
def test_membership_matches_run_enumeration(name):
    A = corpus.machine(name)
    for w in all_words(A.input_alphabet, 8 if len(A.input_alphabet) <= 2 else 6):
        got = accepts_lambda_free(A, w)
        assert got == accepts_by_runs(A, w)
        assert got == accepts_lambda_free(A, w, prune=False)
        assert (accepts_bounded(A, w, 0) == ACCEPTED) == got


@pytest.mark.parametrize("name", MACHINES)
def test_prune_never_changes_enumeration(name):
    A = corpus.machine(name)
    n = 5 if A.lambda_free else 4
    assert enumerate_language(A, n, 12) == enumerate_language(A, n, 12, prune=False)


def test_l1_bounded_examples():
    A = corpus.machine("l1")
    assert l1_member("10cc")
    assert accepts_bounded(A, "10cc", 32) == ACCEPTED
    assert not l1_member("1ccc")
    for budget in (0, 8, 32, 128, 600):
        assert accepts_bounded(A, "1ccc", budget) == NOT_WITHIN_BUDGET


def test_enumeration_examples():
    assert enumerate_language(corpus.machine("z_empty"), 5, 16) == set()
    A = corpus.machine("anbn")
    prev = set()
    for n in range(7):
        cur = enumerate_language(A, n)
        assert prev <= cur
        prev = cur


def test_labeling_lambda_free():
    A = corpus.machine("anbn")
    T = rational_labeling(A)
    for e in T.edges:
        got = e.label.elements(3)
        want = {x.monoid for x in A.edges if (x.src, x.input, x.dst) == (e.src, e.letter, e.dst)}
        assert got == want


def test_labeling_chain():
    A = machine([("q0", "", (v,), "q1"), ("q1", "a", (vbar, v), "q2")], {"q2"})
    T = rational_labeling(A)
    [e] = [e for e in T.edges if e.src == "q0" and e.dst == "q2"]
    assert e.label.elements(6) == {(v, vbar, v)}


def test_labeling_lambda_loop():
    A = machine([("q0", "", (v,), "q0"), ("q0", "a", (vbar,), "q1")], {"q1"})
    T = rational_labeling(A)
    [e] = [e for e in T.edges if e.src == "q0" and e.dst == "q1"]
    for i in range(5):
        assert e.label.spells((v,) * i + (vbar,))
    assert not e.label.spells((vbar, v))


@pytest.mark.parametrize("name", [n for n in MACHINES if not corpus.machine(n).lambda_free])
def test_labeling_preserves_language(name):
    A = corpus.machine(name)
    E = expand_rat_transducer(rational_labeling(A))
    n = 5 if len(A.input_alphabet) <= 2 else 4
    assert enumerate_language(E, n, 40) == enumerate_language(A, n, 40)


# free copies: a_i over vertices c1..cn, M = B on vertex m, embedded into M*B with the new vertex a
def _copies_graphs(n):
    copies = [f"c{i}" for i in range(1, n + 1)]
    return copies, make_graph(copies + ["m"]), make_graph(["a", "m"])


def test_embed_examples():
    copies, G, H = _copies_graphs(2)
    b, bb = (pos("m"),), (neg("m"),)
    a, abar, mb, mbar = pos("a"), neg("a"), pos("m"), neg("m")
    w = (pos("c1"), neg("c1"))
    img = embed_free_copies(w, copies, "a", b, bb)
    assert img == (a, mb, a, abar, mbar, abar)
    assert is_identity(G, w) and is_identity(H, img)
    assert embed_free_copies((), copies, "a", b, bb) == ()
    w = (pos("c1"), neg("c2"))
    img = embed_free_copies(w, copies, "a", b, bb)
    assert img == (a, mb, a, abar, mbar, mbar, abar)
    assert not is_identity(G, w) and not is_identity(H, img)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_embed_preserves_identity(n):
    copies, G, H = _copies_graphs(n)
    rng = random.Random(n)
    alphabet = G.alphabet()
    hits = 0
    for _ in range(500):
        # biased towards identities so both verdicts are exercised
        half = [rng.choice(alphabet) for _ in range(rng.randint(0, 5))]
        w = tuple(half) + tuple(x.inverse() for x in reversed(half)) if rng.random() < 0.5 else \
            tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 10)))
        img = embed_free_copies(w, copies, "a", (pos("m"),), (neg("m"),))
        assert is_identity(G, w) == is_identity(H, img)
        hits += is_identity(G, w)
    assert 0 < hits < 500
