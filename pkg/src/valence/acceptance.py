"""The nine acceptance checks, shared by ``valence selftest`` and the test suite.

Each check returns a ``Check``: a verdict plus a one-line detail.  ``quick``
shrinks the sample sizes and length bounds so the whole matrix runs in
seconds; the full sizes are the ones the test suite uses.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import product

from . import corpus
from .automata import (ACCEPTED, accepts_bounded, accepts_by_runs, accepts_lambda_free, all_words,
                       enumerate_language)
from .lambda_elim import ClassificationError, FreeB, TimesZ, classify, decompose, eliminate_lambda
from .lower_bounds import (BZElement, f_exact, f_upper_bound, fooling_set_l1, impossibility_witness,
                           l1_member)
from .semilinear import Multiset, WeightMap, small_preimage
from .traces import (canonical_linearization, dependence_graph, is_identity, normal_form,
                     oracle_is_identity, reduce_fully)

# Table 1 graphs plus B×ℤ and B*B
BENCHMARK_GRAPHS = ("b", "z", "z3", "anticlique3", "bz", "bb")
LAMBDA_MACHINES = ("z_anbm_le", "z_empty", "z_eqcount", "z_lambda_only", "z2_abc", "z2_transfer",
                   "b_anbm_le", "b_anbn_pre", "b_dyck", "b_lambda_only", "bz_abc", "bz_transfer")
STACK_MACHINES = ("bb_pal", "bb_dyck2", "bb_lambda_only", "bb_lambda_pop", "bb_noisy_pal", "bb_nested")
ENUM_BUDGET = 32  # λ-edges allowed per run when enumerating an input machine
L1_BUDGET = 600


@dataclass
class Check:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number}] {self.title}: {self.detail}"


def _random_word(rng, alphabet, maxlen):
    return tuple(rng.choice(alphabet) for _ in range(rng.randint(0, maxlen)))


def word_problem(quick: bool = False, root=None) -> Check:
    maxlen = 6 if quick else 8
    samples = 1000 if quick else 10_000
    rng = random.Random(1)
    t0 = time.time()
    checked = bad = 0
    for name in BENCHMARK_GRAPHS:
        g = corpus.graph(name, root)
        alphabet = g.alphabet()
        if len(alphabet) <= 4:
            words = (w for n in range(maxlen + 1) for w in product(alphabet, repeat=n))
        else:
            words = (_random_word(rng, alphabet, maxlen) for _ in range(samples))
        for w in words:
            checked += 1
            if is_identity(g, w) != oracle_is_identity(g, w):
                bad += 1
    dt = time.time() - t0
    ok = bad == 0 and dt < 120
    return Check(1, "word problem vs rewriting oracle", ok, f"{checked} words, {bad} disagreements, {dt:.1f}s")


def confluence(quick: bool = False, root=None) -> Check:
    per_graph = 100 if quick else 500
    orders = 10
    rng = random.Random(2)
    bad = 0
    for name in BENCHMARK_GRAPHS:
        g = corpus.graph(name, root)
        alphabet = g.alphabet()
        for _ in range(per_graph):
            w = _random_word(rng, alphabet, 12)
            d = dependence_graph(g, w)
            forms = {canonical_linearization(g, reduce_fully(d, random.Random(rng.random())))
                     for _ in range(orders)}
            if len(forms) != 1 or forms != {tuple(normal_form(g, w))}:
                bad += 1
    n = per_graph * len(BENCHMARK_GRAPHS)
    return Check(2, "confluence under random reduction orders", bad == 0,
                 f"{n} words x {orders} orders, {bad} with differing normal forms")


def table_one(quick: bool = False, root=None) -> Check:
    notes = []
    ok = True
    p = decompose(corpus.graph("z3", root))
    if not (len(p.steps) == 3 and all(isinstance(s, TimesZ) for s in p.steps)):
        ok = False
    notes.append(f"Z^3 {p}")
    p = decompose(corpus.graph("anticlique3", root))
    if not (len(p.steps) == 3 and all(isinstance(s, FreeB) for s in p.steps)):
        ok = False
    notes.append(f"B^(3) {p}")
    for name, label in (("bbzz", "B^(2)xZ^2"), ("b3", "B^3")):
        g = corpus.graph(name, root)
        try:
            p = decompose(g)
        except ClassificationError as exc:
            ok = False
            notes.append(f"{label} has no plan ({exc})")
            continue
        rebuilt = p.replay()
        same = g.same_structure(rebuilt) and set(g.vertices) == set(rebuilt.vertices)
        ok = ok and same
        notes.append(f"{label} {p} replay {'ok' if same else 'differs'}")
    return Check(3, "Table 1 decompositions", ok, "; ".join(notes))


def forbidden_path(quick: bool = False, root=None) -> Check:
    res = classify(corpus.graph("p4", root))
    ok = res.forbidden_path == ("u", "x", "y", "v") and not res.in_C
    done = []
    for name in corpus.graph_names(root):
        g = corpus.graph(name, root)
        c = classify(g)
        if c.hypothesis_ok and c.forbidden_path is None:
            try:
                plan = decompose(g)
                ok = ok and g.same_structure(plan.replay())
                done.append(name)
            except ClassificationError:
                ok = False
    return Check(4, "forbidden path detection", ok,
                 f"p4 -> {res.forbidden_path}; decomposed {len(done)} pattern-free graphs ({', '.join(done)})")


def lambda_free_membership(quick: bool = False, root=None) -> Check:
    maxlen = 6 if quick else 8
    ok = True
    names = []
    words = 0
    for name in corpus.machine_names(root):
        A = corpus.machine(name, root)
        if not A.lambda_free:
            continue
        names.append(name)
        for w in all_words(A.input_alphabet, maxlen):
            words += 1
            if accepts_lambda_free(A, w) != accepts_by_runs(A, w):
                ok = False
    A = corpus.machine("anbn", root)
    top = 8 if quick else 10
    got = {w for w in all_words(A.input_alphabet, top) if accepts_lambda_free(A, w)}
    want = {"a" * n + "b" * n for n in range(1, top // 2 + 1)}
    ok = ok and got == want
    return Check(5, "lambda-free membership vs run enumeration", ok,
                 f"{len(names)} machines, {words} words; anbn exact up to length {top}: {got == want}")


def elimination(quick: bool = False, root=None) -> Check:
    t0 = time.time()
    bad = []
    plain = LAMBDA_MACHINES[:4] if quick else LAMBDA_MACHINES
    stack = STACK_MACHINES[:2] if quick else STACK_MACHINES
    for names, maxlen in ((plain, 6 if quick else 8), (stack, 4 if quick else 6)):
        for name in names:
            A = corpus.machine(name, root)
            B = eliminate_lambda(A.graph, A)
            if not B.lambda_free or enumerate_language(B, maxlen) != enumerate_language(A, maxlen, ENUM_BUDGET):
                bad.append(name)
    dt = time.time() - t0
    ok = not bad and dt < 600
    return Check(6, "lambda elimination preserves languages", ok,
                 f"{len(plain)} machines over Z/Z^2/B/BxZ, {len(stack)} over B*B, "
                 f"{len(bad)} failures{' ' + ', '.join(bad) if bad else ''}, {dt:.1f}s")


def preimages(quick: bool = False, root=None) -> Check:
    rng = random.Random(7)
    trials = 200 if quick else 1000
    bad = 0
    for _ in range(trials):
        k = rng.randint(1, 5)
        m = rng.randint(1, 4)
        alphabet = tuple(f"x{i}" for i in range(k))
        phi = WeightMap(alphabet, tuple(rng.randint(-m, m) for _ in range(k)))
        mu = Multiset(alphabet, tuple(rng.randint(0, 6) for _ in range(k)))
        nu = small_preimage(phi, mu)
        target = phi(mu)
        good = nu.divides(mu) and phi(nu) == target and len(nu) <= (phi.m + 2) * abs(target)
        if target == 0:
            good = good and len(nu) == 0
        bad += not good
    return Check(7, "small preimage bound", bad == 0, f"{trials} random (phi, mu), {bad} violations")


def lower_bound(quick: bool = False, root=None) -> Check:
    n = impossibility_witness(10, 1, 2, 0)
    ok = n == 11 and 2 ** 11 == 2048 and 10 * f_upper_bound(2, 0, 1, 11) == 1440 == 10 * (1 * 11 + 1) ** 2
    # fooling conditions, pair by pair
    fool_ok = True
    for k in range(1, 7):
        pairs = fooling_set_l1(k)
        fool_ok &= len(pairs) == 2 ** k and all(l1_member(u + v) for u, v in pairs)
        for (u1, v1), (u2, v2) in product(pairs, repeat=2):
            if u1 != u2 and len(v1) < len(v2):
                fool_ok &= not l1_member(u1 + v2)
    rng = random.Random(11)
    f_ok = True
    for _ in range(20 if quick else 60):
        r, s, m = rng.randint(1, 2), rng.randint(0, 1), rng.randint(1, 2)
        S = set()
        for _ in range(rng.randint(1, 3)):
            S.add(BZElement(tuple((rng.randint(0, m), rng.randint(0, m)) for _ in range(r)),
                            tuple(rng.randint(-m, m) for _ in range(s))))
        for k in range(0, 7):
            f_ok &= f_exact(S, k, r, s) <= f_upper_bound(r, s, m, k)
    return Check(8, "lower bound witness", ok and fool_ok and f_ok,
                 f"witness(10,1,2,0)={n}, 2^{n}={2 ** n} > {10 * f_upper_bound(2, 0, 1, n)}; "
                 f"fooling sets n<=6 {'valid' if fool_ok else 'INVALID'}; f_exact <= bound {f_ok}")


def l1_demo(quick: bool = False, root=None) -> Check:
    maxlen = 6 if quick else 8
    A = corpus.machine("l1", root)
    bad = sum(1 for w in all_words("01c", maxlen)
              if (accepts_bounded(A, w, L1_BUDGET) == ACCEPTED) != l1_member(w))
    B = corpus.machine("l1_lambda_free", root)
    wrong = [w for w in all_words("01c", maxlen) if accepts_lambda_free(B, w) != l1_member(w)]
    ok = bad == 0 and bool(wrong)
    first = repr(wrong[0]) if wrong else "none"
    return Check(9, "L1 over two partially blind counters", ok,
                 f"lambda machine: {bad} disagreements up to length {maxlen}; "
                 f"lambda-free machine fails on {len(wrong)} words (first {first})")


CHECKS = (word_problem, confluence, table_one, forbidden_path, lambda_free_membership, elimination,
          preimages, lower_bound, l1_demo)


def run_all(quick: bool = False, root=None) -> list:
    return [check(quick, root) for check in CHECKS]
