"""Dependence graphs, the convergent trace reduction and the word problem.

A word over X_Γ is turned into its dependence graph: one node per letter and
an arc i -> j (i < j) whenever the two letters do not commute.  A node pair
``+v`` / ``-v`` may be deleted when there is no path from the ``-v`` node to
the ``+v`` node and no surviving node lies on a path between them.  Deleting
such pairs until none is left yields the reduced trace; its lexicographically
least linearisation is the canonical normal form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .graph_core import GenSymbol, StorageGraph, thue_relations


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class OracleCapExceeded(ValueError):
    """The brute-force oracle refuses words above its size cap."""


@dataclass(frozen=True)
class ReduciblePair:
    pos_node: int
    neg_node: int


@dataclass(frozen=True)
class DependenceGraph:
    """Nodes are positions 1..n of the original word; deleted nodes are tombstoned."""

    labels: tuple
    arcs: frozenset
    alive: frozenset

    def label(self, i: int) -> GenSymbol:
        return self.labels[i - 1]

    def alive_word(self) -> tuple:
        return tuple(self.label(i) for i in sorted(self.alive))

    def __len__(self) -> int:
        return len(self.alive)


class _Codec:
    """Integer encoding of one graph's symbols, shared by the fast paths."""

    def __init__(self, g: StorageGraph):
        self.g = g
        self.symbols = g.alphabet()
        self.code = {x: i for i, x in enumerate(self.symbols)}
        n = len(self.symbols)
        self.indep = [[g.independent(x, y) for y in self.symbols] for x in self.symbols]
        # dep_mask[c] has bit d set when symbol c and d do not commute
        self.dep_mask = [sum(1 << d for d in range(n) if not self.indep[c][d]) for c in range(n)]
        self.looped_codes = frozenset(c for c, x in enumerate(self.symbols) if g.is_looped(x.vertex))

    def encode(self, w: Sequence[GenSymbol]) -> list:
        try:
            return [self.code[x] for x in w]
        except KeyError as exc:
            raise ValueError(f"symbol {exc.args[0]} is not over this graph") from None

    def decode(self, codes) -> tuple:
        return tuple(self.symbols[c] for c in codes)


@lru_cache(maxsize=256)
def _codec(g: StorageGraph) -> _Codec:
    return _Codec(g)


# -- public dependence-graph operations ------------------------------------

def dependence_graph(g: StorageGraph, w: Sequence[GenSymbol]) -> DependenceGraph:
    w = g.check_word(w)
    arcs = set()
    for i in range(1, len(w) + 1):
        for j in range(i + 1, len(w) + 1):
            if not g.independent(w[i - 1], w[j - 1]):
                arcs.add((i, j))
    return DependenceGraph(tuple(w), frozenset(arcs), frozenset(range(1, len(w) + 1)))


def _reach(d: DependenceGraph) -> dict:
    """Descendant sets (as bitmasks) restricted to alive nodes."""
    succ = {i: 0 for i in d.alive}
    for i, j in d.arcs:
        if i in d.alive and j in d.alive:
            succ[i] |= 1 << j
    reach = {}
    for i in sorted(d.alive, reverse=True):
        r = 0
        s = succ[i]
        while s:
            low = s & -s
            j = low.bit_length() - 1
            r |= low | reach[j]
            s ^= low
        reach[i] = r
    return reach


def _pair_ok(reach: dict, x: int, y: int) -> bool:
    if (reach[y] >> x) & 1:
        return False
    between = reach[x]
    while between:
        low = between & -between
        z = low.bit_length() - 1
        if z != y and (reach[z] >> y) & 1:
            return False
        between ^= low
    return True


def reducible_pairs(d: DependenceGraph) -> list:
    reach = _reach(d)
    pairs = []
    alive = sorted(d.alive)
    for x in alive:
        lx = d.label(x)
        if not lx.positive:
            continue
        for y in alive:
            ly = d.label(y)
            if ly.positive or ly.vertex != lx.vertex:
                continue
            if _pair_ok(reach, x, y):
                pairs.append(ReduciblePair(x, y))
    pairs.sort(key=lambda p: (p.pos_node, p.neg_node))
    return pairs


def reduce_once(d: DependenceGraph, p: ReduciblePair) -> DependenceGraph:
    if p not in reducible_pairs(d):
        raise ContractError(f"pair ({p.pos_node}, {p.neg_node}) is not reducible")
    gone = {p.pos_node, p.neg_node}
    arcs = frozenset(a for a in d.arcs if a[0] not in gone and a[1] not in gone)
    return DependenceGraph(d.labels, arcs, d.alive - gone)


def canonical_linearization(g: StorageGraph, d: DependenceGraph) -> tuple:
    """Lexicographically least topological order of the alive nodes."""
    alive = set(d.alive)
    indeg = {i: 0 for i in alive}
    out = {i: [] for i in alive}
    for i, j in d.arcs:
        if i in alive and j in alive:
            indeg[j] += 1
            out[i].append(j)
    ready = [i for i in alive if indeg[i] == 0]
    word = []
    while ready:
        best = min(ready, key=lambda i: (g.symbol_key(d.label(i)), i))
        ready.remove(best)
        word.append(d.label(best))
        for j in out[best]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return tuple(word)


def reduce_fully(d: DependenceGraph, rng: random.Random | None = None) -> DependenceGraph:
    """Apply reductions until none is left; ``rng`` picks pairs at random."""
    while True:
        pairs = reducible_pairs(d)
        if not pairs:
            return d
        p = pairs[0] if rng is None else rng.choice(pairs)
        gone = {p.pos_node, p.neg_node}
        d = DependenceGraph(d.labels, frozenset(a for a in d.arcs if not gone & set(a)), d.alive - gone)


# -- fast normal form --------------------------------------------------

def _nf_extend(cd: _Codec, nf: Sequence[int], codes: Sequence[int]) -> list:
    """Normal form of nf·codes where ``nf`` is already a normal form.

    A new letter can only cancel against the last letter of its partner
    type, and only when that letter is maximal (nothing later depends on it);
    removing a maximal letter creates no further cancellations.
    """
    word = list(nf)
    dep = cd.dep_mask
    looped = cd.looped_codes
    for c in codes:
        if c & 1:
            partner = c - 1
        elif c in looped:
            partner = c + 1
        else:
            word.append(c)
            continue
        i = len(word) - 1
        while i >= 0 and word[i] != partner:
            i -= 1
        if i >= 0:
            m = dep[partner]
            if not any((m >> word[j]) & 1 for j in range(i + 1, len(word))):
                del word[i]
                continue
        word.append(c)
    return _lex_least(cd, word)


def _lex_least(cd: _Codec, codes: Sequence[int]) -> list:
    """Lexicographically least linearisation of the trace of ``codes``."""
    n = len(codes)
    dep = cd.dep_mask
    indeg = [0] * n
    succ = [[] for _ in range(n)]
    for i in range(n):
        m = dep[codes[i]]
        for j in range(i + 1, n):
            if (m >> codes[j]) & 1:
                succ[i].append(j)
                indeg[j] += 1
    ready = [i for i in range(n) if indeg[i] == 0]
    out = []
    while ready:
        best = min(ready, key=lambda i: codes[i])
        ready.remove(best)
        out.append(codes[best])
        for j in succ[best]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return out


def _nf_codes(cd: _Codec, codes: Sequence[int]) -> list:
    n = len(codes)
    if n < 2:
        return list(codes)
    dep = cd.dep_mask
    succ = [0] * n
    for i in range(n):
        m = dep[codes[i]]
        s = 0
        for j in range(i + 1, n):
            if (m >> codes[j]) & 1:
                s |= 1 << j
        succ[i] = s
    alive = (1 << n) - 1
    while True:
        reach = [0] * n
        for i in range(n - 1, -1, -1):
            if not (alive >> i) & 1:
                continue
            r = 0
            s = succ[i] & alive
            while s:
                low = s & -s
                r |= low | reach[low.bit_length() - 1]
                s ^= low
            reach[i] = r
        found = None
        for x in range(n):
            if not (alive >> x) & 1 or codes[x] & 1:
                continue
            target = codes[x] | 1
            for y in range(n):
                if y == x or not (alive >> y) & 1 or codes[y] != target:
                    continue
                if (reach[y] >> x) & 1:
                    continue
                between = reach[x] & ~(1 << y)
                ok = True
                while between:
                    low = between & -between
                    if (reach[low.bit_length() - 1] >> y) & 1:
                        ok = False
                        break
                    between ^= low
                if ok:
                    found = (x, y)
                    break
            if found:
                break
        if found is None:
            break
        alive &= ~((1 << found[0]) | (1 << found[1]))
    # lexicographically least linearisation
    idx = [i for i in range(n) if (alive >> i) & 1]
    indeg = {i: 0 for i in idx}
    for i in idx:
        s = succ[i] & alive
        while s:
            low = s & -s
            indeg[low.bit_length() - 1] += 1
            s ^= low
    ready = [i for i in idx if indeg[i] == 0]
    out = []
    while ready:
        best = min(ready, key=lambda i: codes[i])
        ready.remove(best)
        out.append(codes[best])
        s = succ[best] & alive
        while s:
            low = s & -s
            j = low.bit_length() - 1
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
            s ^= low
    return out


def normal_form(g: StorageGraph, w: Sequence[GenSymbol]) -> tuple:
    cd = _codec(g)
    return cd.decode(_nf_codes(cd, cd.encode(w)))


def normal_form_slow(g: StorageGraph, w: Sequence[GenSymbol]) -> tuple:
    """Same result as :func:`normal_form`, built from the public graph operations."""
    return canonical_linearization(g, reduce_fully(dependence_graph(g, w)))


def is_identity(g: StorageGraph, w: Sequence[GenSymbol]) -> bool:
    return len(normal_form(g, w)) == 0


def trace_equal(g: StorageGraph, u: Sequence[GenSymbol], v: Sequence[GenSymbol]) -> bool:
    return normal_form(g, u) == normal_form(g, v)


# -- brute-force oracle --------------------------------------------------

class RewritingOracle:
    """Breadth-first search over R_Γ rewriting, never growing a word.

    Commutations keep the length and cancellations shorten, so reaching λ
    from ``w`` only visits words of length at most ``|w|``.  Results are
    cached per commutation class: every word of a class can reach every other.
    """

    def __init__(self, g: StorageGraph, cap: int = 12):
        self.g = g
        self.cap = cap
        rules = thue_relations(g)
        syms = g.alphabet()
        code = {x: i for i, x in enumerate(syms)}
        self.commutes = set()
        self.cancels = set()
        for r in rules:
            a, b = (code[x] for x in r.lhs)
            if r.kind == "commutation":
                self.commutes.add((a, b))
            else:
                self.cancels.add((a, b))
        self.code = code
        self.memo: dict = {(): True}

    def __call__(self, w: Sequence[GenSymbol]) -> bool:
        w = tuple(w)
        if len(w) > self.cap:
            raise OracleCapExceeded(f"word length {len(w)} exceeds oracle cap {self.cap}")
        return self._solve(tuple(self.code[x] for x in self.g.check_word(w)))

    def _solve(self, w: tuple) -> bool:
        if len(w) % 2:
            return False
        hit = self.memo.get(w)
        if hit is not None:
            return hit
        seen = {w}
        stack = [w]
        commutes, cancels = self.commutes, self.cancels
        result = False
        while stack and not result:
            v = stack.pop()
            for i in range(len(v) - 1):
                pair = (v[i], v[i + 1])
                if pair in cancels and self._solve(v[:i] + v[i + 2:]):
                    result = True
                    break
                if pair in commutes:
                    u = v[:i] + (v[i + 1], v[i]) + v[i + 2:]
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
        if result:
            # the class is only partly explored; every explored word still reaches λ
            for v in seen:
                self.memo[v] = True
        else:
            for v in seen:
                self.memo[v] = False
        return result


@lru_cache(maxsize=64)
def _oracle(g: StorageGraph, cap: int) -> RewritingOracle:
    return RewritingOracle(g, cap)


def oracle_is_identity(g: StorageGraph, w: Sequence[GenSymbol], cap: int = 12) -> bool:
    return _oracle(g, cap)(w)
