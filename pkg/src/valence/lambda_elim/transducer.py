"""Valence transducers with commutative output, used inside the eliminators.

A ``VTransducer`` reads one letter or λ per edge, multiplies a storage word
and adds an output vector in ℤ^d.  It accepts a pair (w, c) when some run
from the initial to a final state reads w, has storage product 1 and output
sum c.

An ``SLTransducer`` is λ-free and each edge carries a semilinear set of
outputs instead of a vector; the empty input is handled separately through
``empty_outputs``.  Runs start in ``initial`` and use at least one edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from ..automata import Edge, ValenceAutomaton
from ..graph_core import GenSymbol, StorageGraph
from ..semilinear import SemilinearSet
from . import slalg


class VEdge(NamedTuple):
    src: object
    letter: str  # "" is λ
    word: tuple
    out: tuple
    dst: object


class SLEdge(NamedTuple):
    src: object
    letter: str
    word: tuple
    out: SemilinearSet
    dst: object


def _live(initial, finals, arcs) -> set:
    """States reachable from ``initial`` that can reach a final state."""
    out: dict = {}
    back: dict = {}
    for a, b in arcs:
        out.setdefault(a, []).append(b)
        back.setdefault(b, []).append(a)
    fwd = {initial}
    stack = [initial]
    while stack:
        q = stack.pop()
        for r in out.get(q, ()):
            if r not in fwd:
                fwd.add(r)
                stack.append(r)
    live = {q for q in finals if q in fwd}
    stack = list(live)
    while stack:
        q = stack.pop()
        for r in back.get(q, ()):
            if r in fwd and r not in live:
                live.add(r)
                stack.append(r)
    return live


def _fresh(taken: set, base: str):
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


@dataclass
class VTransducer:
    graph: StorageGraph
    alphabet: tuple
    states: list
    initial: object
    finals: frozenset
    edges: list
    dim: int = 0

    @classmethod
    def from_automaton(cls, A: ValenceAutomaton) -> "VTransducer":
        edges = [VEdge(e.src, e.input, tuple(e.monoid), (), e.dst) for e in A.edges]
        return cls(A.graph, tuple(A.input_alphabet), list(A.states), A.initial, frozenset(A.finals), edges, 0)

    def single_symbol(self) -> "VTransducer":
        """Equivalent transducer whose edges carry at most one storage symbol."""
        taken = set(self.states)
        states = list(self.states)
        edges = []
        for n, e in enumerate(self.edges):
            if len(e.word) <= 1:
                edges.append(e)
                continue
            prev = e.src
            for i, sym in enumerate(e.word):
                last = i == len(e.word) - 1
                nxt = e.dst if last else _fresh(taken, f"{e.src}~{n}.{i}")
                if not last:
                    states.append(nxt)
                edges.append(VEdge(prev, e.letter if i == 0 else "", (sym,),
                                   e.out if i == 0 else (0,) * self.dim, nxt))
                prev = nxt
        return VTransducer(self.graph, self.alphabet, states, self.initial, self.finals, edges, self.dim)

    def trimmed(self) -> "VTransducer":
        """Keep states on some path from the initial state to a final state."""
        live = _live(self.initial, self.finals, [(e.src, e.dst) for e in self.edges])
        return VTransducer(self.graph, self.alphabet, [q for q in self.states if q in live], self.initial,
                           frozenset(self.finals & live),
                           [e for e in self.edges if e.src in live and e.dst in live], self.dim)

    def to_automaton(self) -> ValenceAutomaton:
        if self.dim:
            raise ValueError("only transducers with trivial output are automata")
        names = {q: str(q) for q in self.states}
        if len(set(names.values())) != len(names) or any(" " in n for n in names.values()):
            names = {q: f"s{i}" for i, q in enumerate(self.states)}
        edges = [Edge(names[e.src], e.letter, e.word, names[e.dst]) for e in self.edges]
        return ValenceAutomaton(self.graph, self.alphabet, tuple(names[q] for q in self.states),
                                names[self.initial], frozenset(names[q] for q in self.finals), tuple(edges))


@dataclass
class SLTransducer:
    graph: StorageGraph
    alphabet: tuple
    states: list
    initial: object
    finals: frozenset
    edges: list
    empty_outputs: SemilinearSet
    dim: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.edges = [e for e in self.edges if e.out.parts]

    def trimmed(self) -> "SLTransducer":
        """Drop states that are not on a path from the initial state to a final state."""
        live = _live(self.initial, self.finals, [(e.src, e.dst) for e in self.edges])
        live.add(self.initial)
        states = [q for q in self.states if q in live]
        edges = [e for e in self.edges if e.src in live and e.dst in live]
        return SLTransducer(self.graph, self.alphabet, states, self.initial, frozenset(self.finals & live),
                            edges, self.empty_outputs, self.dim, dict(self.metadata))

    def expand(self) -> VTransducer:
        """Spell every semilinear set by a λ-gadget: base edge, period loops, exit."""
        taken = set(self.states)
        states = list(self.states)
        zero = (0,) * self.dim
        start = _fresh(taken, "start")
        states.append(start)
        edges: list = []

        def gadget(src, letter, word, S, dst, tag):
            for j, part in enumerate(S.parts):
                mid = _fresh(taken, f"{tag}.{j}")
                states.append(mid)
                edges.append(VEdge(src, letter, word, part.base, mid))
                for per in part.periods:
                    edges.append(VEdge(mid, "", (), per, mid))
                edges.append(VEdge(mid, "", (), zero, dst))

        for n, e in enumerate(self.edges):
            gadget(e.src, e.letter, e.word, e.out, e.dst, f"g{n}")
            if e.src == self.initial:
                gadget(start, e.letter, e.word, e.out, e.dst, f"h{n}")
        finals = set(self.finals)
        if self.empty_outputs.parts:
            done = _fresh(taken, "done")
            states.append(done)
            finals.add(done)
            gadget(start, "", (), self.empty_outputs, done, "e")
        return VTransducer(self.graph, self.alphabet, states, start, frozenset(finals), edges, self.dim)

    def flatten(self) -> ValenceAutomaton:
        """The λ-free automaton for trivial output (every set is {()} or empty)."""
        if self.dim:
            raise ValueError("flatten needs trivial output; project the output first")
        T = self.trimmed()
        names = {q: f"q{i}" for i, q in enumerate(T.states)}
        used = set(names.values())
        start = _fresh(used, "init")
        states = [start] + [names[q] for q in T.states]
        edges = []
        for e in T.edges:
            edges.append(Edge(names[e.src], e.letter, tuple(e.word), names[e.dst]))
            if e.src == T.initial:
                edges.append(Edge(start, e.letter, tuple(e.word), names[e.dst]))
        finals = {names[q] for q in T.finals}
        if T.empty_outputs.parts:
            finals.add(start)
        return ValenceAutomaton(T.graph, T.alphabet, tuple(states), start, frozenset(finals), tuple(edges))

    @property
    def size(self) -> tuple:
        return len(self.states), len(self.edges)


def power_word(vertex: str, n: int) -> tuple:
    """gⁿ as a word: n copies of +g, or |n| copies of -g."""
    return (GenSymbol(vertex, n > 0),) * abs(n)


def check_outputs(T: SLTransducer) -> None:
    for e in T.edges:
        if e.out.dim != T.dim:
            raise ValueError("edge output of the wrong dimension")
    if T.empty_outputs.dim != T.dim:
        raise ValueError("empty-word output of the wrong dimension")


def zero_outputs(dim: int) -> SemilinearSet:
    return slalg.zero_set(dim)
