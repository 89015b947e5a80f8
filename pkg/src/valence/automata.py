"""Valence automata over graph monoids and the searches that run them.

A run is accepted when it ends in a final state and the product of its
monoid words is the identity.  Searches key their memo tables on the
canonical normal form of the product so far, which collapses all prefixes
that are equal in the monoid.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Iterable, NamedTuple, Sequence

from .graph_core import GenSymbol, StorageGraph, format_word, parse_graph, parse_word
from .traces import _codec, _nf_extend, normal_form_slow


class AutomatonError(ValueError):
    pass


class Edge(NamedTuple):
    src: str
    input: str  # "" is λ
    monoid: tuple
    dst: str


ACCEPTED = "accepted"
NOT_WITHIN_BUDGET = "not-within-budget"


@dataclass(frozen=True)
class ValenceAutomaton:
    graph: StorageGraph
    input_alphabet: tuple
    states: tuple
    initial: str
    finals: frozenset
    edges: tuple
    graph_path: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        sset = set(self.states)
        if len(sset) != len(self.states):
            raise AutomatonError("duplicate state")
        if self.initial not in sset:
            raise AutomatonError(f"initial state {self.initial!r} is not declared")
        if not self.finals <= sset:
            raise AutomatonError(f"undeclared final state(s): {sorted(self.finals - sset)}")
        letters = set(self.input_alphabet)
        for e in self.edges:
            if e.src not in sset or e.dst not in sset:
                raise AutomatonError(f"edge {e.src}->{e.dst} uses an undeclared state")
            for x in e.input:
                if x not in letters:
                    raise AutomatonError(f"edge input letter {x!r} is not in the alphabet")
            self.graph.check_word(e.monoid)

    @property
    def lambda_free(self) -> bool:
        return all(e.input for e in self.edges)

    @property
    def m_max(self) -> int:
        return max((len(e.monoid) for e in self.edges), default=0)

    def out_edges(self) -> dict:
        out = {q: [] for q in self.states}
        for e in self.edges:
            out[e.src].append(e)
        return out


# -- file format -----------------------------------------------------------

def _split_long_inputs(states: list, edges: list) -> tuple:
    """Edges reading more than one letter become chains of single-letter edges."""
    taken = set(states)
    new_edges = []
    for n, e in enumerate(edges):
        if len(e.input) <= 1:
            new_edges.append(e)
            continue
        prev = e.src
        for i, x in enumerate(e.input):
            if i == len(e.input) - 1:
                nxt = e.dst
            else:
                nxt = f"{e.src}.{n}.{i}"
                while nxt in taken:
                    nxt += "'"
                taken.add(nxt)
                states.append(nxt)
            new_edges.append(Edge(prev, x, e.monoid if i == 0 else (), nxt))
            prev = nxt
    return states, new_edges


def parse_automaton(text: str, graph: StorageGraph | None = None, base_dir: str | None = None) -> ValenceAutomaton:
    """Parse the line format; ``graph`` overrides the file's ``graph`` line."""
    graph_path = None
    alphabet: list = []
    states: list = []
    initial = None
    finals: list = []
    edges: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "graph":
                if not rest:
                    raise AutomatonError("graph line needs a path")
                graph_path = rest
            elif head == "alphabet":
                for tok in rest.split():
                    if len(tok) != 1 or tok == "@":
                        raise AutomatonError(f"alphabet symbols are single characters, got {tok!r}")
                    alphabet.append(tok)
            elif head == "state":
                states.extend(rest.split())
            elif head == "initial":
                if len(rest.split()) != 1:
                    raise AutomatonError("initial takes exactly one state")
                initial = rest
            elif head == "final":
                finals.extend(rest.split())
            elif head == "edge":
                edges.append(_parse_edge(rest))
            else:
                raise AutomatonError(f"unknown directive {head!r}")
        except (AutomatonError, ValueError) as exc:
            raise AutomatonError(f"line {lineno}: {exc}") from None
    if initial is None:
        raise AutomatonError("missing initial line")
    if graph is None:
        if graph_path is None:
            raise AutomatonError("missing graph line")
        path = graph_path if base_dir is None else os.path.join(base_dir, graph_path)
        try:
            with open(path, encoding="utf-8") as fh:
                graph = parse_graph(fh.read())
        except OSError as exc:
            raise AutomatonError(f"cannot read graph {path}: {exc.strerror}") from None
    for e in edges:
        for x in e.monoid:
            if not graph.has_vertex(x.vertex):
                raise AutomatonError(f"edge {e.src}->{e.dst}: unknown vertex {x.vertex!r}")
    states, edges = _split_long_inputs(states, edges)
    return ValenceAutomaton(graph, tuple(alphabet), tuple(states), initial, frozenset(finals), tuple(edges), graph_path)


def _parse_edge(rest: str) -> Edge:
    if " mon=" not in " " + rest:
        raise AutomatonError("edge needs mon=")
    before, _, mon = (" " + rest).partition(" mon=")
    toks = before.split()
    if len(toks) != 3 or not toks[2].startswith("in="):
        raise AutomatonError("edge syntax is: edge SRC DST in=WORD mon=TOKENS")
    inp = toks[2][3:]
    if inp == "@":
        inp = ""
    elif not inp:
        raise AutomatonError("empty in= (write in=@ for λ)")
    return Edge(toks[0], inp, parse_word(mon.strip()), toks[1])


def load_automaton(path: str, graph: StorageGraph | None = None) -> ValenceAutomaton:
    with open(path, encoding="utf-8") as fh:
        return parse_automaton(fh.read(), graph=graph, base_dir=os.path.dirname(os.path.abspath(path)))


def serialize_automaton(A: ValenceAutomaton, graph_path: str | None = None) -> str:
    path = graph_path or A.graph_path
    lines = []
    if path:
        lines.append(f"graph {path}")
    if A.input_alphabet:
        lines.append("alphabet " + " ".join(A.input_alphabet))
    lines.append("state " + " ".join(A.states))
    lines.append(f"initial {A.initial}")
    if A.finals:
        lines.append("final " + " ".join(q for q in A.states if q in A.finals))
    for e in A.edges:
        lines.append(f"edge {e.src} {e.dst} in={e.input or '@'} mon={format_word(e.monoid)}")
    return "\n".join(lines) + "\n"


# -- membership --------------------------------------------------------------

class _Runner:
    """Edges and normal forms in the integer encoding of the ambient graph."""

    def __init__(self, A: ValenceAutomaton, prune: bool = True):
        self.A = A
        self.prune = prune
        self.cd = _codec(A.graph)
        # negative codes of unlooped vertices.  One that survives in a reduced
        # normal form is stuck for good: whatever separates it from a matching
        # positive letter could only cancel against a later letter, and the
        # dependent one next to it cannot move past it.
        self.blocking = {c for c, x in enumerate(self.cd.symbols)
                         if not x.positive and not A.graph.is_looped(x.vertex)}
        self.letter_edges: dict = {}
        self.lambda_edges: dict = {}
        for e in A.edges:
            codes = tuple(self.cd.encode(e.monoid))
            if len(e.input) > 1:
                raise AutomatonError("edges must read at most one letter")
            table = self.letter_edges.setdefault(e.input, {}) if e.input else self.lambda_edges
            table.setdefault(e.src, []).append((codes, e.dst))
        self.m = A.m_max
        self._cache: dict = {}

    def step(self, nf: tuple, codes: tuple) -> tuple | None:
        """Normal form of ``nf·codes``; None when pruning proves it can never reach λ."""
        if not codes:
            return nf
        key = (nf, codes)
        hit = self._cache.get(key, 0)
        if hit == 0:
            hit = tuple(_nf_extend(self.cd, nf, codes))
            if self.prune and self._dead(hit):
                hit = None
            if len(self._cache) < 500000:
                self._cache[key] = hit
        return hit

    def _dead(self, nf: tuple) -> bool:
        return any(c in self.blocking for c in nf)


def accepts_lambda_free(A: ValenceAutomaton, w: str, prune: bool = True) -> bool:
    if not A.lambda_free:
        raise AutomatonError("accepts_lambda_free needs a λ-free automaton")
    w = tuple(w)
    R = _Runner(A, prune)
    n = len(w)
    finals = A.finals
    memo: dict = {}

    def search(q: str, i: int, nf: tuple) -> bool:
        if prune and len(nf) > R.m * (n - i):
            return False
        if i == n:
            return q in finals and not nf
        key = (q, i, nf)
        hit = memo.get(key)
        if hit is not None:
            return hit
        memo[key] = False
        result = False
        for codes, dst in R.letter_edges.get(w[i], {}).get(q, ()):
            nf2 = R.step(nf, codes)
            if nf2 is not None and search(dst, i + 1, nf2):
                result = True
                break
        memo[key] = result
        return result

    return search(A.initial, 0, ())


def accepts_by_runs(A: ValenceAutomaton, w: str) -> bool:
    """Independent check: enumerate every run reading ``w`` and reduce its full product."""
    if not A.lambda_free:
        raise AutomatonError("run enumeration needs a λ-free automaton")
    runs = [(A.initial, ())]
    by_src: dict = {}
    for e in A.edges:
        by_src.setdefault((e.src, e.input), []).append(e)
    for x in w:
        runs = [(e.dst, prod + e.monoid) for q, prod in runs for e in by_src.get((q, x), ())]
    return any(q in A.finals and not normal_form_slow(A.graph, prod) for q, prod in runs)


def accepts_bounded(A: ValenceAutomaton, w: str, budget: int, prune: bool = True) -> str:
    """Search runs with at most ``budget`` λ-edges; never claims non-membership."""
    if budget < 0:
        raise AutomatonError("budget must be nonnegative")
    w = tuple(w)
    R = _Runner(A, prune)
    n = len(w)
    finals = A.finals
    best: dict = {}  # (state, pos, nf) -> largest remaining budget already explored
    stack = [(A.initial, 0, (), budget)]
    while stack:
        q, i, nf, left = stack.pop()
        if prune and len(nf) > R.m * (left + n - i):
            continue
        key = (q, i, nf)
        if best.get(key, -1) >= left:
            continue
        best[key] = left
        if i == n and q in finals and not nf:
            return ACCEPTED
        if left:
            for codes, dst in R.lambda_edges.get(q, ()):
                nf2 = R.step(nf, codes)
                if nf2 is not None:
                    stack.append((dst, i, nf2, left - 1))
        if i < n:
            for codes, dst in R.letter_edges.get(w[i], {}).get(q, ()):
                nf2 = R.step(nf, codes)
                if nf2 is not None:
                    stack.append((dst, i + 1, nf2, left))
    return NOT_WITHIN_BUDGET


def enumerate_language(A: ValenceAutomaton, maxlen: int, budget: int = 0, prune: bool = True) -> set:
    """Words of length ≤ maxlen accepted with ≤ budget λ-edges (budget unused when λ-free).

    Walks the prefix tree once, carrying for every prefix the reachable
    ``(state, normal form)`` pairs together with the fewest λ-edges used.
    """
    R = _Runner(A, prune)
    if A.lambda_free:
        budget = 0
    finals = A.finals
    result = set()

    def closure(configs: dict, rest: int) -> dict:
        # breadth-first over λ-edges so the first visit uses the fewest
        frontier = list(configs.items())
        while frontier:
            nxt = []
            for (q, nf), used in frontier:
                if used >= budget:
                    continue
                for codes, dst in R.lambda_edges.get(q, ()):
                    nf2 = R.step(nf, codes)
                    if nf2 is None or prune and len(nf2) > R.m * (budget - used - 1 + rest):
                        continue
                    key = (dst, nf2)
                    if key not in configs or configs[key] > used + 1:
                        configs[key] = used + 1
                        nxt.append((key, used + 1))
            frontier = nxt
        return configs

    start = closure({(A.initial, ()): 0}, maxlen)
    stack = [("", start)]
    while stack:
        prefix, configs = stack.pop()
        if any(q in finals and not nf for (q, nf) in configs):
            result.add(prefix)
        if len(prefix) == maxlen:
            continue
        rest = maxlen - len(prefix) - 1
        for x in A.input_alphabet:
            table = R.letter_edges.get(x, {})
            nxt: dict = {}
            for (q, nf), used in configs.items():
                for codes, dst in table.get(q, ()):
                    nf2 = R.step(nf, codes)
                    if nf2 is None or prune and len(nf2) > R.m * (budget - used + rest):
                        continue
                    key = (dst, nf2)
                    if key not in nxt or nxt[key] > used:
                        nxt[key] = used
            if nxt:
                stack.append((prefix + x, closure(nxt, rest)))
    return result


def all_words(alphabet: Sequence[str], maxlen: int) -> Iterable[str]:
    for n in range(maxlen + 1):
        for t in iproduct(alphabet, repeat=n):
            yield "".join(t)


# -- rational labels ---------------------------------------------------------

@dataclass(frozen=True)
class RationalLabel:
    """A finite automaton spelling a rational subset of MΓ × C.

    Transitions are ``(src, word, dst)`` where every letter of ``word`` is a
    GenSymbol or an output symbol; ``word`` may be empty.
    """

    states: tuple
    start: object
    accept: frozenset
    transitions: tuple
    outputs: tuple = ()

    def __post_init__(self):
        if not self.states:
            raise AutomatonError("a rational label needs at least one state")
        allowed = set(self.outputs)
        for _, word, _ in self.transitions:
            for x in word:
                if not isinstance(x, GenSymbol) and x not in allowed:
                    raise AutomatonError(f"label letter {x!r} is outside the combined alphabet")

    def elements(self, max_steps: int) -> set:
        """Words spelled by accepting paths with at most ``max_steps`` transitions."""
        out = set()
        frontier = {(self.start, ())}
        seen = set(frontier)
        for _ in range(max_steps + 1):
            nxt = set()
            for q, w in frontier:
                if q in self.accept:
                    out.add(w)
                for s, word, t in self.transitions:
                    if s == q:
                        item = (t, w + tuple(word))
                        if item not in seen:
                            seen.add(item)
                            nxt.add(item)
            frontier = nxt
        return out

    def spells(self, word: Sequence, max_steps: int | None = None) -> bool:
        """Whether some accepting path spells exactly ``word``."""
        word = tuple(word)
        # states reachable after consuming a prefix, ε-transitions included
        configs = {(self.start, 0)}
        stack = list(configs)
        while stack:
            q, i = stack.pop()
            for s, lab, t in self.transitions:
                if s != q:
                    continue
                j = i + len(lab)
                if tuple(word[i:j]) == tuple(lab) and (t, j) not in configs:
                    configs.add((t, j))
                    stack.append((t, j))
        return any(q in self.accept and i == len(word) for q, i in configs)


class RatEdge(NamedTuple):
    src: str
    letter: str
    label: RationalLabel
    dst: str


@dataclass(frozen=True)
class RatLabeledTransducer:
    graph: StorageGraph
    input_alphabet: tuple
    states: tuple
    initial: str
    finals: frozenset
    edges: tuple
    empty_label: RationalLabel | None = None  # elements of λ-paths from initial to a final state


def _carve(A: ValenceAutomaton, p: str, x: str | None, q_targets: Iterable[str]) -> RationalLabel | None:
    """Label automaton for paths p →λ* →x →λ* q (or p →λ* q when x is None)."""
    lam = [e for e in A.edges if not e.input]
    letter = [e for e in A.edges if e.input == x] if x is not None else []
    phases = (0, 1) if x is not None else (0,)
    trans = []
    for ph in phases:
        for e in lam:
            trans.append(((e.src, ph), e.monoid, (e.dst, ph)))
    for e in letter:
        trans.append(((e.src, 0), e.monoid, (e.dst, 1)))
    last = phases[-1]
    start = (p, 0)
    accept = {(q, last) for q in q_targets}
    # trim to useful states
    fwd = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for a, _, b in trans:
            if a == s and b not in fwd:
                fwd.add(b)
                stack.append(b)
    bwd = set(accept & fwd)
    stack = list(bwd)
    while stack:
        s = stack.pop()
        for a, _, b in trans:
            if b == s and a in fwd and a not in bwd:
                bwd.add(a)
                stack.append(a)
    if start not in bwd:
        return None
    trans = tuple(t for t in trans if t[0] in bwd and t[2] in bwd)
    states = tuple(sorted(bwd, key=str))
    return RationalLabel(states, start, frozenset(accept & bwd), trans)


def rational_labeling(A: ValenceAutomaton) -> RatLabeledTransducer:
    if any(len(e.input) > 1 for e in A.edges):
        states, edges = _split_long_inputs(list(A.states), list(A.edges))
        A = ValenceAutomaton(A.graph, A.input_alphabet, tuple(states), A.initial, A.finals, tuple(edges),
                             A.graph_path)
    edges = []
    for p in A.states:
        for x in A.input_alphabet:
            for q in A.states:
                lab = _carve(A, p, x, [q])
                if lab is not None:
                    edges.append(RatEdge(p, x, lab, q))
    empty = _carve(A, A.initial, None, A.finals)
    return RatLabeledTransducer(A.graph, A.input_alphabet, A.states, A.initial, A.finals, tuple(edges), empty)


def expand_rat_transducer(T: RatLabeledTransducer) -> ValenceAutomaton:
    """Inline every label automaton as λ-edges; the edge's letter is read on entry."""
    states = list(T.states)
    edges = []
    for n, e in enumerate(T.edges):
        name = {s: f"{n}:{s[0]}:{s[1]}" for s in e.label.states}
        states.extend(name.values())
        edges.append(Edge(e.src, e.letter, (), name[e.label.start]))
        for s, word, t in e.label.transitions:
            edges.append(Edge(name[s], "", tuple(word), name[t]))
        for s in e.label.accept:
            edges.append(Edge(name[s], "", (), e.dst))
    finals = set(T.finals)
    if T.empty_label is not None:
        name = {s: f"e:{s[0]}:{s[1]}" for s in T.empty_label.states}
        states.extend(name.values())
        fin = "fin"
        while fin in states:
            fin += "'"
        states.append(fin)
        finals.add(fin)
        edges.append(Edge(T.initial, "", (), name[T.empty_label.start]))
        for s, word, t in T.empty_label.transitions:
            edges.append(Edge(name[s], "", tuple(word), name[t]))
        for s in T.empty_label.accept:
            edges.append(Edge(name[s], "", (), fin))
    return ValenceAutomaton(T.graph, T.input_alphabet, tuple(states), T.initial, frozenset(finals), tuple(edges))


# -- free copies ---------------------------------------------------------

def embed_free_copies(w: Sequence[GenSymbol], copies: Sequence[str], a: str,
                      b: Sequence[GenSymbol], b_bar: Sequence[GenSymbol]) -> tuple:
    """Image under a_i ↦ a bⁱ a, ā_i ↦ ā b̄ⁱ ā (copies[i-1] is the vertex of a_i).

    Letters on other vertices are left unchanged.
    """
    index = {v: i for i, v in enumerate(copies, start=1)}
    A, Abar = GenSymbol(a, True), GenSymbol(a, False)
    out: list = []
    for x in w:
        i = index.get(x.vertex)
        if i is None:
            out.append(x)
        elif x.positive:
            out += [A, *tuple(b) * i, A]
        else:
            out += [Abar, *tuple(b_bar) * i, Abar]
    return tuple(out)
