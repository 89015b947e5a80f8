"""Rational normal form over B × C.

Every element of B is ā^k a^l, so B = J(B), L(B) = ā*, R(B) = a* and U(B)
is trivial.  A rational subset S of B × C (C free commutative on the output
letters) splits as a finite union of L·U·R: cut each accepting path at a
node s such that the part before s reduces to a power of ā and the part
after it to a power of a.  Inside either part, well-bracketed stretches
u →* w are replaced by a gadget spelling their output set.
"""

from __future__ import annotations

from ..automata import RationalLabel
from ..graph_core import GenSymbol
from . import slalg


def _steps(S: RationalLabel):
    """Single-letter steps of S: (src, letter or None, dst), with chain nodes added."""
    nodes = list(S.states)
    steps = []
    for n, (src, word, dst) in enumerate(S.transitions):
        if not word:
            steps.append((src, None, dst))
            continue
        prev = src
        for i, x in enumerate(word):
            nxt = dst if i == len(word) - 1 else ("~", n, i)
            if i < len(word) - 1:
                nodes.append(nxt)
            steps.append((prev, x, nxt))
            prev = nxt
    return nodes, steps


def _word_of(vec, outputs) -> tuple:
    out = []
    for c, o in zip(vec, outputs):
        if c < 0:
            raise ValueError("negative output count")
        out += [o] * c
    return tuple(out)


def _label(start, accept, moves, glued, outputs) -> RationalLabel | None:
    """Label automaton with single-symbol ``moves`` plus a gadget per glued set."""
    trans = [(s, (x,), t) for s, x, t in moves]
    for k, ((u, w), K) in enumerate(sorted(glued.items(), key=repr)):
        for j, part in enumerate(K.parts):
            g = ("g", k, j)
            trans.append((u, _word_of(part.base, outputs), g))
            for p in part.periods:
                trans.append((g, _word_of(p, outputs), g))
            trans.append((g, (), w))
    fwd = {start}
    stack = [start]
    while stack:
        q = stack.pop()
        for a, _, b in trans:
            if a == q and b not in fwd:
                fwd.add(b)
                stack.append(b)
    live = {accept} & fwd
    stack = list(live)
    while stack:
        q = stack.pop()
        for a, _, b in trans:
            if b == q and a in fwd and a not in live:
                live.add(a)
                stack.append(a)
    if start not in live:
        return None
    trans = tuple(t for t in trans if t[0] in live and t[2] in live)
    return RationalLabel(tuple(sorted(live, key=repr)), start, frozenset({accept}), trans, tuple(outputs))


def rat_normal_B(S: RationalLabel, vertex: str | None = None) -> list:
    """Triples (L, U, R) of rational labels with S = ⋃ L·U·R in B × C.

    L spells elements of ā* × C, U only {1} × C (here just the unit) and R
    elements of a* × C.  ``vertex`` is the vertex of B; it is read off the
    label when omitted.
    """
    outputs = tuple(S.outputs)
    vs = {x.vertex for _, w, _ in S.transitions for x in w if isinstance(x, GenSymbol)}
    if vertex is None:
        if len(vs) > 1:
            raise ValueError(f"label uses several vertices {sorted(vs)}; expected B")
        vertex = next(iter(vs), "a")
    elif vs - {vertex}:
        raise ValueError(f"label uses vertices outside B: {sorted(vs - {vertex})}")
    d = len(outputs)
    index = {o: i for i, o in enumerate(outputs)}
    nodes, steps = _steps(S)
    brackets = []
    for s, x, t in steps:
        if x is None:
            brackets.append((s, slalg.NEUTRAL, None, slalg.zero_set(d), t))
        elif isinstance(x, GenSymbol):
            kind = slalg.OPEN if x.positive else slalg.CLOSE
            brackets.append((s, kind, x.vertex, slalg.zero_set(d), t))
        else:
            v = [0] * d
            v[index[x]] = 1
            brackets.append((s, slalg.NEUTRAL, None, slalg.point(v), t))
    K = slalg.dyck_sums(nodes, brackets, d)
    # a glued stretch u →* u spelling only 1 adds nothing
    glued = {uw: Kuw for uw, Kuw in K.items()
             if uw[0] != uw[1] or any(any(p.base) or p.periods for p in Kuw.parts)}
    bars = [(s, x, t) for s, x, t in steps if isinstance(x, GenSymbol) and not x.positive]
    ups = [(s, x, t) for s, x, t in steps if isinstance(x, GenSymbol) and x.positive]
    unit = RationalLabel(("u",), "u", frozenset({"u"}), (), outputs)
    triples = []
    for s in nodes:
        Ls = _label(S.start, s, bars, glued, outputs)
        if Ls is None:
            continue
        for f in sorted(S.accept, key=repr):
            Rs = _rebase(_label(s, f, ups, glued, outputs))
            if Rs is not None:
                triples.append((Ls, unit, Rs))
    return triples


def _rebase(lab: RationalLabel | None) -> RationalLabel | None:
    """Tag the states of an R-side label so it never shares names with its L-side."""
    if lab is None:
        return None
    ren = {q: ("R", q) for q in lab.states}
    return RationalLabel(tuple(ren[q] for q in lab.states), ren[lab.start], frozenset(ren[q] for q in lab.accept),
                         tuple((ren[a], w, ren[b]) for a, w, b in lab.transitions), lab.outputs)
