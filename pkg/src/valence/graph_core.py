"""Storage graphs, the generator alphabet and the defining relations of graph monoids.

A storage graph has vertices, some of them looped, and undirected edges
between distinct vertices.  Every vertex ``v`` contributes two generators,
``+v`` (push / increment) and ``-v`` (pop / decrement).  ``+v -v`` always
cancels; symbols on adjacent vertices commute; on a looped vertex ``+v`` and
``-v`` commute with each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Raised for malformed graph files or inconsistent graph data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WordError(ValueError):
    """Raised when a monoid word does not fit its graph."""


@dataclass(frozen=True, order=True)
class GenSymbol:
    """One generator: ``positive`` means a_v, otherwise the barred generator."""

    vertex: str
    positive: bool = True

    def inverse(self) -> "GenSymbol":
        return GenSymbol(self.vertex, not self.positive)

    def __str__(self) -> str:
        return ("+" if self.positive else "-") + self.vertex


MonoidWord = tuple  # tuple[GenSymbol, ...]; the empty tuple is λ


def pos(v: str) -> GenSymbol:
    return GenSymbol(v, True)


def neg(v: str) -> GenSymbol:
    return GenSymbol(v, False)


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple
    rhs: tuple
    kind: str  # "cancellation" or "commutation"

    def __str__(self) -> str:
        return f"{format_word(self.lhs)} -> {format_word(self.rhs)}"


@dataclass(frozen=True)
class StorageGraph:
    """Γ = (V, E) with loop flags kept apart from the edge set."""

    vertices: tuple = ()
    looped: frozenset = frozenset()
    edges: frozenset = frozenset()
    _index: dict = field(default=None, init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise GraphError("duplicate vertex identifier")
        looped = frozenset(self.looped)
        edges = frozenset(frozenset(e) for e in self.edges)
        vset = set(verts)
        if not looped <= vset:
            raise GraphError(f"looped vertex not declared: {sorted(looped - vset)}")
        for e in edges:
            if len(e) != 2:
                raise GraphError("an edge must join two distinct vertices")
            if not e <= vset:
                raise GraphError(f"edge endpoint not declared: {sorted(e - vset)}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "looped", looped)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(verts)})

    # -- basic queries -------------------------------------------------
    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise WordError(f"unknown vertex {v!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._index

    def is_looped(self, v: str) -> bool:
        return v in self.looped

    def adjacent(self, v: str, w: str) -> bool:
        return frozenset((v, w)) in self.edges

    def neighbours(self, v: str) -> set:
        return {w for e in self.edges if v in e for w in e if w != v}

    @property
    def unlooped(self) -> tuple:
        return tuple(v for v in self.vertices if v not in self.looped)

    def alphabet(self) -> list:
        """X_Γ in canonical order: by vertex index, positive before negative."""
        return [GenSymbol(v, p) for v in self.vertices for p in (True, False)]

    def symbol_key(self, x: GenSymbol) -> tuple:
        return (self.index(x.vertex), 0 if x.positive else 1)

    def independent(self, x: GenSymbol, y: GenSymbol) -> bool:
        if x == y:
            return False
        if x.vertex == y.vertex:
            return x.vertex in self.looped
        return self.adjacent(x.vertex, y.vertex)

    def check_word(self, w: Iterable[GenSymbol]) -> tuple:
        w = tuple(w)
        for x in w:
            if not isinstance(x, GenSymbol):
                raise WordError(f"not a generator symbol: {x!r}")
            if x.vertex not in self._index:
                raise WordError(f"symbol {x} refers to unknown vertex")
        return w

    # -- derived graphs ------------------------------------------------
    def without(self, v: str) -> "StorageGraph":
        return StorageGraph(
            tuple(u for u in self.vertices if u != v),
            self.looped - {v},
            frozenset(e for e in self.edges if v not in e),
        )

    def loop_free(self) -> "StorageGraph":
        return StorageGraph(self.vertices, frozenset(), self.edges)

    def same_structure(self, other: "StorageGraph") -> bool:
        """Equality up to vertex declaration order."""
        return (
            set(self.vertices) == set(other.vertices)
            and self.looped == other.looped
            and self.edges == other.edges
        )


def make_graph(vertices: Sequence[str], looped: Iterable[str] = (), edges: Iterable = ()) -> StorageGraph:
    return StorageGraph(tuple(vertices), frozenset(looped), frozenset(frozenset(e) for e in edges))


# -- file format -------------------------------------------------------

def parse_graph(text: str) -> StorageGraph:
    vertices: list = []
    looped: set = set()
    edges: set = set()
    seen: set = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "vertex":
            if len(parts) == 2:
                flag = False
            elif len(parts) == 3 and parts[2] == "looped":
                flag = True
            else:
                raise GraphError(f"malformed vertex line: {raw.strip()!r}", lineno)
            name = parts[1]
            _check_name(name, lineno)
            if name in seen:
                raise GraphError(f"duplicate vertex {name!r}", lineno)
            seen.add(name)
            vertices.append(name)
            if flag:
                looped.add(name)
        elif head == "edge":
            if len(parts) != 3:
                raise GraphError(f"malformed edge line: {raw.strip()!r}", lineno)
            a, b = parts[1], parts[2]
            for x in (a, b):
                if x not in seen:
                    raise GraphError(f"edge endpoint {x!r} is not a declared vertex", lineno)
            if a == b:
                raise GraphError(f"self-edge on {a!r}; declare the vertex as looped instead", lineno)
            edges.add(frozenset((a, b)))
        else:
            raise GraphError(f"unknown directive {head!r}", lineno)
    return StorageGraph(tuple(vertices), frozenset(looped), frozenset(edges))


def _check_name(name: str, lineno: int) -> None:
    if name in ("@",) or name[0] in "+-" or any(c.isspace() for c in name):
        raise GraphError(f"invalid vertex name {name!r}", lineno)


def serialize_graph(g: StorageGraph) -> str:
    lines = []
    for v in g.vertices:
        lines.append(f"vertex {v} looped" if v in g.looped else f"vertex {v}")
    ordered = sorted((tuple(sorted(e, key=g.index)) for e in g.edges),
                     key=lambda p: (g.index(p[0]), g.index(p[1])))
    for a, b in ordered:
        lines.append(f"edge {a} {b}")
    return "\n".join(lines) + "\n"


# -- words -------------------------------------------------------------

def parse_word(text: str, g: StorageGraph | None = None) -> tuple:
    """Parse ``+v -w ...``; ``@`` (or an empty string) is the empty word."""
    tokens = text.split()
    if tokens == ["@"] or not tokens:
        return ()
    out = []
    for tok in tokens:
        if len(tok) < 2 or tok[0] not in "+-":
            raise WordError(f"bad monoid token {tok!r} (expected +name or -name)")
        out.append(GenSymbol(tok[1:], tok[0] == "+"))
    w = tuple(out)
    if g is not None:
        g.check_word(w)
    return w


def format_word(w: Sequence[GenSymbol]) -> str:
    return " ".join(map(str, w)) if w else "@"


def formal_inverse(w: Sequence[GenSymbol]) -> tuple:
    """Reverse the word and flip every polarity."""
    return tuple(x.inverse() for x in reversed(tuple(w)))


# -- relations -----------------------------------------------------------

def thue_relations(g: StorageGraph) -> set:
    rules = set()
    for v in g.vertices:
        rules.add(RewriteRule((pos(v), neg(v)), (), "cancellation"))
    for e in g.edges:
        v, w = sorted(e, key=g.index)
        for x in (pos(v), neg(v)):
            for y in (pos(w), neg(w)):
                rules.add(RewriteRule((x, y), (y, x), "commutation"))
                rules.add(RewriteRule((y, x), (x, y), "commutation"))
    for v in g.looped:
        rules.add(RewriteRule((pos(v), neg(v)), (neg(v), pos(v)), "commutation"))
        rules.add(RewriteRule((neg(v), pos(v)), (pos(v), neg(v)), "commutation"))
    return rules


def independence_relation(g: StorageGraph) -> set:
    """Unordered independent pairs as two-element frozensets."""
    pairs = set()
    alphabet = g.alphabet()
    for i, x in enumerate(alphabet):
        for y in alphabet[i + 1:]:
            if g.independent(x, y):
                pairs.add(frozenset((x, y)))
    return pairs


def iter_words(g: StorageGraph, length: int) -> Iterator[tuple]:
    """All words of exactly ``length`` symbols, in canonical order."""
    from itertools import product

    return (tuple(w) for w in product(g.alphabet(), repeat=length))
