"""λ-elimination for M * B, given λ-elimination for a non-trivial M.

Outline:

* Each edge label (paths p →λ* →x →λ* q) is rewritten with the identity
  paths glued in as output-only edges.  Splitting every path at its last ā
  (the letter ``x̄`` on the outer vertex) and its first a gives edge forms
  L_{r,s} J_{t,u} R_{v,w}, where L-blocks end with ā, J lives in M × C and
  R-blocks start with a.  States of the boundary automata name the blocks.
* A one-state transducer D over M reads block names and multiplies the M-part
  of a block: the part of an L-block before its ā, a J-part, the part of an
  R-block after its a.  D̂ is its λ-free form, obtained recursively.
* Stack symbols Θ over n fresh copies of B: ``R(v,w)`` stands for an
  R-block set not yet used, ``L(r,s)`` for material already cancelled
  against L_{r,s}, ``Q(y)`` for the state of D̂ on top of an M-region, and
  ``BOX`` for the a that opened that region.  Operations split, merge,
  cancel, convert-to, convert-from and their deep variants rearrange them.
* The intermediate machine has these operations as λ-loops on every state.
  Every edge form and every J-edge of D̂ gives the glued path
  p →(λ, L̄(r,s)) 2 →(x, Q̄(y) m Q(z)) 3 →(λ, R(v,w)) q.  The bottom of the
  stack carries a D̂ region for M-content outside every a-block: the initial
  loop pushes Q(ŷ₀) L(r,r) and the final loop pops R(v,v) Q(f).
* Fusion: bounded runs of operations are multiplied into the neighbouring
  letter edge; products that leave J are dropped at once.  The resulting
  λ-free machine over M * B^(n) is embedded into M * B by
  a_i ↦ a bⁱ a, ā_i ↦ ā b̄ⁱ ā with b a generator of M.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from ..graph_core import GenSymbol, StorageGraph
from ..traces import normal_form
from . import slalg
from .classify import FreeB
from .free_b import anchors, bracket_edges, letter_graph
from .transducer import SLEdge, SLTransducer, VEdge, VTransducer

# operations allowed before the first glued λ-edge and at the middle state
PREFIX_OPS = 6
MIDDLE_OPS = 4
# how many symbols below the product's own pushes one fused run may pop
POP_DEPTH = 6


class StackPreparationError(RuntimeError):
    pass


# -- block automata -----------------------------------------------------------

@dataclass
class Blocks:
    """Glued label graphs of all letters with their L/J/R block structure."""

    nodes: list
    mid: list  # (u, sym or None, SL, w); sym is an inner generator
    bars: list  # (u, SL, w) reading ā
    ups: list  # (u, SL, w) reading a
    forms: list  # (p, letter, q, S, s1, s2, E)
    l_reach: dict = field(default_factory=dict)
    j_reach: dict = field(default_factory=dict)
    r_reach: dict = field(default_factory=dict)
    l_succ: dict = field(default_factory=dict)
    r_succ: dict = field(default_factory=dict)

    def l_cycles(self, r) -> bool:
        """Whether L_{r,r} holds more than the empty word."""
        return any(r in self.l_reach[t] for t in self.l_succ.get(r, ()))

    def r_cycles(self, v) -> bool:
        return any(v in self.r_reach[t] for t in self.r_succ.get(v, ()))


def _reach(nodes, succ) -> dict:
    out = {}
    for u in nodes:
        seen = {u}
        stack = [u]
        while stack:
            a = stack.pop()
            for b in succ.get(a, ()):
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        out[u] = seen
    return out


def build_blocks(T: VTransducer, outer: str, brackets: set) -> Blocks:
    d = T.dim
    nodes: list = []
    mid: list = []
    bars: list = []
    ups: list = []
    for c in T.alphabet:
        cn, ce = letter_graph(T, c)
        tag = lambda n, c=c: (c,) + n  # noqa: E731
        nodes += [tag(n) for n in cn]
        K = slalg.dyck_sums(cn, bracket_edges(ce, brackets), d)
        for s, sym, S, t in ce:
            if sym is None or sym.vertex != outer:
                mid.append((tag(s), sym, S, tag(t)))
            elif sym.positive:
                ups.append((tag(s), S, tag(t)))
            else:
                bars.append((tag(s), S, tag(t)))
        for (u, w), S in K.items():
            if u == w and all(not any(p.base) and not p.periods for p in S.parts):
                continue
            mid.append((tag(u), None, S, tag(w)))
    # boundary automata, by reachability: L_{r,s} (ā-terminated blocks), J_{t,u}, R_{v,w}
    msucc: dict = {}
    for u, _, _, w in mid:
        msucc.setdefault(u, set()).add(w)
    j_reach = _reach(nodes, msucc)
    l_succ: dict = {}
    for u, _, w in bars:
        for r in nodes:
            if u in j_reach[r]:
                l_succ.setdefault(r, set()).add(w)
    r_succ: dict = {}
    for u, _, w in ups:
        for t in nodes:
            if t in j_reach[w]:
                r_succ.setdefault(u, set()).add(t)
    l_reach = _reach(nodes, l_succ)
    r_reach = _reach(nodes, r_succ)
    forms = []
    anchor = anchors(T)
    for c in T.alphabet:
        for p in anchor:
            S = (c, p, 0)
            for q in anchor:
                E = (c, q, 1)
                for s1 in l_reach[S]:
                    for s2 in j_reach[s1]:
                        if E in r_reach[s2]:
                            forms.append((p, c, q, S, s1, s2, E))
    return Blocks(nodes, mid, bars, ups, forms, l_reach, j_reach, r_reach, l_succ, r_succ)


# -- stack symbols and operations ----------------------------------------------

@dataclass(frozen=True)
class Op:
    kind: str
    word: tuple  # tokens (sign, symbol) for Θ letters, GenSymbol for M letters
    out: object  # SemilinearSet


def _pop(sym):
    return (-1, sym)


def _push(sym):
    return (1, sym)


class Product:
    """Reduced products over M * B^(n) restricted to J.

    A product is a tuple of items: Θ letters ``(±1, symbol)`` and M-words
    (tuples of generators in normal form).  Appending a pop right after a
    push of the same symbol with trivial M-content between cancels; any other
    push … pop meeting leaves J and kills the product.
    """

    def __init__(self, inner_graph: StorageGraph):
        self.g = inner_graph
        self._nf = lru_cache(maxsize=None)(self._nf_raw)

    def _nf_raw(self, w: tuple) -> tuple:
        return tuple(normal_form(self.g, w))

    def append(self, items: tuple, token) -> tuple | None:
        if isinstance(token, GenSymbol):
            if items and not isinstance(items[-1][0], int):
                m = self._nf(items[-1] + (token,))
                return items[:-1] + ((m,) if m else ())
            return items + ((token,),)
        sign, sym = token
        if sign > 0:
            return items + (token,)
        # a pop: look for the last Θ letter
        if not items:
            return (token,)
        last = items[-1]
        if isinstance(last[0], int):
            if last[0] > 0:
                return items[:-1] if last[1] == sym else None
            return items + (token,)
        # an M-word on top
        if len(items) >= 2 and items[-2][0] == 1:
            return None  # a m ā with m ≠ 1
        return items + (token,)

    def extend(self, items: tuple, word) -> tuple | None:
        for tok in word:
            items = self.append(items, tok)
            if items is None:
                return None
        return items

    def concat(self, items: tuple, more: tuple) -> tuple | None:
        """Product of two reduced products."""
        for it in more:
            items = self.extend(items, it) if not isinstance(it[0], int) else self.append(items, it)
            if items is None:
                return None
        return items

    @staticmethod
    def top_pushes(items: tuple, k: int) -> list:
        """The last k pushed symbols when they sit directly on top of each other."""
        out = []
        i = len(items) - 1
        while i >= 0 and len(out) < k:
            it = items[i]
            if isinstance(it[0], int) and it[0] > 0:
                out.append(it[1])
                i -= 1
            else:
                break
        return out

    @staticmethod
    def depth(items: tuple) -> int:
        return sum(1 for it in items if isinstance(it[0], int) and it[0] < 0)


def symbol_pairs(bl: Blocks):
    """Θ-pairs: R(v,w) for nonempty R_{v,w}, L(r,s) for nonempty L_{r,s}, on useful boundary nodes.

    A diagonal pair whose set is just {ε} is left out: its symbol would stand
    for nothing, and every operation on it is the identity.
    """
    u_plus = {v for f in bl.forms for v in bl.r_reach[f[5]] if f[6] in bl.r_reach[v]}
    u_minus = {s for f in bl.forms for s in bl.l_reach[f[3]] if f[4] in bl.l_reach[s]}
    o_pairs = sorted((v, w) for v in u_plus for w in bl.r_reach[v]
                     if w in u_plus and (v != w or bl.r_cycles(v)))
    n_pairs = sorted((r, s) for r in u_minus for s in bl.l_reach[r]
                     if s in u_minus and (r != s or bl.l_cycles(r)))
    return o_pairs, n_pairs


def cancel_sets(bl: Blocks, o_pairs, n_pairs, outer, brackets, d) -> dict:
    """C[(v,w),(r,s)]: outputs of identity words in R_{v,w} L_{r,s}."""
    ends = {w for _, w in o_pairs}
    starts = {r for r, _ in n_pairs}
    o_by_w: dict = {}
    for v, w in o_pairs:
        o_by_w.setdefault(w, []).append(v)
    n_by_r: dict = {}
    for r, s in n_pairs:
        n_by_r.setdefault(r, []).append(s)
    zero = slalg.zero_set(d)
    base_edges = []
    for u, S, w in bl.ups:
        base_edges.append((("+b", u), slalg.OPEN, outer, S, ("+i", w)))
    for u, S, w in bl.bars:
        base_edges.append((("-i", u), slalg.CLOSE, outer, S, ("-b", w)))
    for u, sym, S, w in bl.mid:
        for side in ("+i", "-i"):
            if sym is None:
                base_edges.append(((side, u), slalg.NEUTRAL, None, S, (side, w)))
            else:
                kind = slalg.OPEN if sym.positive else slalg.CLOSE
                base_edges.append(((side, u), kind, sym.vertex, S, (side, w)))
    for u in bl.nodes:
        base_edges.append((("+i", u), slalg.NEUTRAL, None, zero, ("+b", u)))
        base_edges.append((("-b", u), slalg.NEUTRAL, None, zero, ("-i", u)))
    nodes = [(side, u) for side in ("+b", "+i", "-b", "-i") for u in bl.nodes]
    out = {}
    for w in sorted(ends):
        for r in sorted(starts):
            edges = base_edges + [(("+b", w), slalg.NEUTRAL, None, zero, ("-b", r))]
            K = slalg.dyck_sums(nodes, edges, d)
            for v in o_by_w.get(w, ()):
                for s in n_by_r.get(r, ()):
                    S = K.get((("+b", v), ("-b", s)))
                    if S is not None and S.parts:
                        out[(v, w), (r, s)] = S
    return out


def block_transducer(bl: Blocks, o_pairs, n_pairs, inner_graph, d) -> VTransducer:
    """D: reads block names and multiplies the M-part of one block."""
    zero = (0,) * d
    states = ["d"]
    edges: list = []
    taken = {"d"}
    gadgets: dict = {}

    def copy(tag):
        """Mid graph copy; returns node naming function."""
        if tag not in gadgets:
            gadgets[tag] = True
            for u in bl.nodes:
                states.append((tag, u))
            for n, (u, sym, S, w) in enumerate(bl.mid):
                word = (sym,) if sym is not None else ()
                for j, part in enumerate(S.parts):
                    if not part.periods:
                        edges.append(VEdge((tag, u), "", word, part.base, (tag, w)))
                        continue
                    g = (tag, "g", n, j)
                    states.append(g)
                    edges.append(VEdge((tag, u), "", word, part.base, g))
                    for per in part.periods:
                        edges.append(VEdge(g, "", (), per, g))
                    edges.append(VEdge(g, "", (), zero, (tag, w)))
        return lambda u: (tag, u)

    letters = []
    for r, s in n_pairs:
        bars = [(u, S) for u, S, w in bl.bars if w == s and u in bl.j_reach[r]]
        if not bars:
            continue
        letter = ("L", r, s)
        letters.append(letter)
        node = copy(("L", s))
        edges.append(VEdge("d", letter, (), zero, node(r)))
        for u, S in bars:
            for part in S.parts:  # bar edges carry single points
                edges.append(VEdge(node(u), "", (), part.base, "d"))
    for t, u in sorted({(f[4], f[5]) for f in bl.forms}):
        letter = ("J", t, u)
        letters.append(letter)
        node = copy(("J", u))
        edges.append(VEdge("d", letter, (), zero, node(t)))
        edges.append(VEdge(node(u), "", (), zero, "d"))
    for v, w in o_pairs:
        ups = [(t, S) for u, S, t in bl.ups if u == v and w in bl.j_reach[t]]
        if not ups:
            continue
        letter = ("R", v, w)
        letters.append(letter)
        node = copy(("R", w))
        for t, S in ups:
            for part in S.parts:
                edges.append(VEdge("d", letter, (), part.base, node(t)))
        edges.append(VEdge(node(w), "", (), zero, "d"))
    return VTransducer(inner_graph, tuple(letters), states, "d", frozenset({"d"}), edges, d).trimmed()


# -- symbols, operations and the intermediate machine ---------------------------

BOX = ("box",)


def sym_r(v, w):
    return ("o", v, w)


def sym_l(r, s):
    return ("n", r, s)


def sym_q(y):
    return ("q", y)


def base_operations(o_pairs, n_pairs, C: dict, Dh: SLTransducer, d: int) -> list:
    """Split, merge, cancel, convert-to and convert-from."""
    zero = slalg.zero_set(d)
    ops = []
    o_set = set(o_pairs)
    o_from: dict = {}
    for v, w in o_pairs:
        o_from.setdefault(v, []).append(w)
    for v, w in o_pairs:
        for v2 in o_from[v]:
            if (v2, w) in o_set:
                ops.append(Op("split", (_pop(sym_r(v, w)), _push(sym_r(v, v2)), _push(sym_r(v2, w))), zero))
    n_set = set(n_pairs)
    n_from: dict = {}
    for r, s in n_pairs:
        n_from.setdefault(r, []).append(s)
    for r, s in n_pairs:
        for r2 in n_from[r]:
            if (r2, s) in n_set:
                ops.append(Op("merge", (_pop(sym_l(r, r2)), _pop(sym_l(r2, s)), _push(sym_l(r, s))), zero))
    for ((v, w), (r, s)), S in C.items():
        ops.append(Op("cancel", (_pop(sym_r(v, w)), _push(sym_l(r, s))), S))
    for e in Dh.edges:
        kind, x, y = e.letter
        if kind == "R" and e.src == Dh.initial:
            ops.append(Op("convert-to", (_pop(sym_r(x, y)), _push(BOX)) + tuple(e.word) + (_push(sym_q(e.dst)),),
                          e.out))
        if kind == "L" and e.dst in Dh.finals:
            ops.append(Op("convert-from", (_pop(sym_q(e.src)),) + tuple(e.word) + (_pop(BOX), _push(sym_l(x, y))),
                          e.out))
    return ops


def deep(op: Op, xs) -> Op:
    """The operation performed underneath the symbols xs (top first)."""
    pops = tuple(_pop(x) for x in xs)
    pushes = tuple(_push(x) for x in reversed(xs))
    return Op(op.kind + "@" * len(xs), pops + op.word + pushes, op.out)


@dataclass
class IntermediateMachine:
    """The machine with stack symbols Θ before fusion.

    ``loops`` are the operations, present as λ-loops on every state;
    ``glued`` are the three-step paths (src, letter, [(word, out, dst)...]).
    """

    states: list
    initial: object
    finals: frozenset
    symbols: list
    loops: list
    glued: list
    initial_loops: list
    final_loops: list

    def loops_at(self, state) -> list:
        return self.loops if state in self.states else []


@dataclass
class StackPreparation:
    blocks: Blocks
    o_pairs: list
    n_pairs: list
    cancel: dict
    D: VTransducer
    Dh: SLTransducer
    machine: IntermediateMachine


def _inner_is_free(plan) -> bool:
    return all(isinstance(s, FreeB) for s in plan.steps)


def prepare(T: VTransducer, plan, recurse) -> StackPreparation:
    outer = plan.steps[0].vertex
    if not _inner_is_free(plan):
        raise StackPreparationError("identity sets under a direct factor ℤ are not available")
    T = T.single_symbol()
    d = T.dim
    brackets = set(T.graph.vertices)
    inner_graph = T.graph.without(outer)
    bl = build_blocks(T, outer, brackets)
    o_pairs, n_pairs = symbol_pairs(bl)
    C = cancel_sets(bl, o_pairs, n_pairs, outer, brackets, d)
    D = block_transducer(bl, o_pairs, n_pairs, inner_graph, d)
    Dh = recurse(D, plan.inner).trimmed()
    ops = base_operations(o_pairs, n_pairs, C, Dh, d)
    symbols = sorted({tok[1] for op in ops for tok in op.word if not isinstance(tok, GenSymbol)}
                     | {sym_q(y) for y in Dh.states} | {sym_r(v, w) for v, w in o_pairs}
                     | {sym_l(r, s) for r, s in n_pairs}, key=repr)
    zero = slalg.zero_set(d)
    glued = []
    j_edges: dict = {}
    for e in Dh.edges:
        if e.letter[0] == "J":
            j_edges.setdefault(e.letter[1:], []).append(e)
    o_set, n_set = set(o_pairs), set(n_pairs)
    for p, c, q, S, s1, s2, E in bl.forms:
        firsts = [()] if S == s1 else []
        if (S, s1) in n_set:
            firsts.append((_pop(sym_l(S, s1)),))
        lasts = [()] if s2 == E else []
        if (s2, E) in o_set:
            lasts.append((_push(sym_r(s2, E)),))
        paths = []
        for e in j_edges.get((s1, s2), ()):
            w2 = (_pop(sym_q(e.src)),) + tuple(e.word) + (_push(sym_q(e.dst)),)
            paths += [((w1, w2, w3), e.out, q) for w1 in firsts for w3 in lasts]
        if paths:
            glued.append((p, c, paths))
    initial_loops = [Op("initial", (_push(sym_q(Dh.initial)),), zero)]
    ends = [()] + [(_pop(sym_r(v, w)),) for v, w in o_pairs if v == w]
    final_loops = [Op("final", x + (_pop(sym_q(f)),), zero) for x in ends for f in Dh.finals]
    if Dh.empty_outputs.parts:
        final_loops += [Op("final", x + (_pop(sym_q(Dh.initial)),), Dh.empty_outputs) for x in ends]
    machine = IntermediateMachine(list(T.states), T.initial, T.finals, symbols, ops, glued,
                                  initial_loops, final_loops)
    return StackPreparation(bl, o_pairs, n_pairs, C, D, Dh, machine)


# -- fusion --------------------------------------------------------------------

class _Runner:
    """Bounded runs of operations from given products, with their output sets."""

    def __init__(self, machine: IntermediateMachine, prod: Product, d: int):
        self.prod = prod
        self.d = d
        self.base = machine.loops
        self.by_first: dict = {}
        for op in self.base:
            self.by_first.setdefault(op.word[0][1], []).append(op)
        self._deep: dict = {}

    def _under(self, xs: tuple, below) -> list:
        """Operations performed under the fresh symbols xs whose own first pop meets ``below``."""
        key = (xs, below)
        if key not in self._deep:
            cands = self.by_first.get(below, ()) if below is not None else self.base
            self._deep[key] = [deep(op, xs) for op in cands]
        return self._deep[key]

    def candidates(self, items: tuple) -> list:
        tops = self.prod.top_pushes(items, 3)
        if not tops:
            return self.base
        out = list(self.by_first.get(tops[0], ()))
        for k in (1, 2):
            if len(tops) >= k:
                below = tops[k] if len(tops) > k else None
                if below is None and k < len(tops):
                    continue
                out += self._under(tuple(tops[:k]), below)
        return out

    @staticmethod
    def plausible(items: tuple, below: bool) -> bool:
        """Pops under the known top must start with the BOX of the region below it."""
        for it in items:
            if isinstance(it[0], int):
                if it[0] > 0:
                    return True
                return below and it[1] == BOX and Product.depth(items) <= POP_DEPTH
        return True

    def run(self, starts: dict, limit: int, below: bool = True) -> dict:
        total = dict(starts)
        frontier = dict(starts)
        for _ in range(limit):
            nxt: dict = {}
            for items, S in frontier.items():
                for op in self.candidates(items):
                    it2 = self.prod.extend(items, op.word)
                    if it2 is None or not self.plausible(it2, below):
                        continue
                    S2 = slalg.plus(S, op.out) if self.d else S
                    nxt[it2] = slalg.union(nxt[it2], S2) if it2 in nxt else S2
            frontier = {}
            for it, S in nxt.items():
                if it in total:
                    if self.d and not slalg.subset(S, total[it]):
                        total[it] = slalg.union(total[it], S)
                        frontier[it] = S
                else:
                    total[it] = S
                    frontier[it] = S
            if not frontier:
                break
        return total


def _strip(items: tuple, prefix: tuple) -> tuple:
    """The word w with prefix · w = items, for items computed from the pushes ``prefix``."""
    k = 0
    while k < len(prefix) and k < len(items) and items[k] == prefix[k]:
        k += 1
    return tuple(_pop(tok[1]) for tok in reversed(prefix[k:])) + items[k:]


def fuse(prep: StackPreparation, inner_graph: StorageGraph, d: int,
         prefix_ops: int = PREFIX_OPS, middle_ops: int = MIDDLE_OPS) -> tuple:
    """Fused λ-free edges over M * B^(n): list of (src, letter, items, SL, dst).

    Every glued path ends by pushing Q(z) R(v,w), so a segment leaving state
    p starts with one of these pairs on top; runs of operations are computed
    from that known top and the pair is stripped off afterwards.
    """
    M = prep.machine
    prod = Product(inner_graph)
    runner = _Runner(M, prod, d)
    zero = slalg.zero_set(d)
    start, end = ("start",), ("end",)
    edges: dict = {}

    def emit(src, letter, items, S, dst):
        key = (src, letter, items, dst)
        edges[key] = slalg.union(edges[key], S) if key in edges else S

    glued_by_src: dict = {}
    tops: dict = {}
    for p, c, paths in M.glued:
        glued_by_src.setdefault(p, []).append((c, paths))
        for (w1, w2, w3), out, q in paths:
            tops.setdefault(q, set()).add((w2[-1],) + w3)

    def tails(prefix):
        """Runs of operations ending with a final loop, from the top ``prefix``."""
        res: dict = {}
        for it, S in runner.run({prefix: zero}, prefix_ops).items():
            for op in M.final_loops:
                it2 = prod.extend(it, op.word)
                if it2 is not None:
                    w = _strip(it2, prefix)
                    S2 = slalg.plus(S, op.out)
                    res[w] = slalg.union(res[w], S2) if w in res else S2
        return res

    tail_cache: dict = {}

    def segment(src_label, p, prefix: tuple, begin: dict, below=True):
        pre = runner.run(begin, prefix_ops, below)
        middles: dict = {}  # the middle runs depend only on w1

        def middle(w1):
            if w1 not in middles:
                after1: dict = {}
                for items, S in pre.items():
                    it = prod.extend(items, w1)
                    if it is not None and runner.plausible(it, below):
                        after1[it] = slalg.union(after1[it], S) if it in after1 else S
                middles[w1] = runner.run(after1, middle_ops, below) if after1 else {}
            return middles[w1]

        for c, paths in glued_by_src.get(p, ()):
            for (w1, w2, w3), out, q in paths:
                mid = middle(w1)
                for items, S in mid.items():
                    it = prod.extend(items, w2 + w3)
                    if it is None:
                        continue
                    word = _strip(it, prefix)
                    S2 = slalg.plus(S, out)
                    emit(src_label, c, word, S2, q)
                    if q in M.finals:
                        top = (w2[-1],) + w3
                        if top not in tail_cache:
                            tail_cache[top] = tails(top)
                        for tw, S3 in tail_cache[top].items():
                            full = prod.concat(word, tw)
                            if full is not None:
                                emit(src_label, c, full, slalg.plus(S2, S3), end)

    for p in M.states:
        for top in sorted(tops.get(p, ()), key=repr):
            segment(p, p, top, {top: zero})
    begin: dict = {}
    for op in M.initial_loops:
        begin[prod.extend((), op.word)] = op.out
    segment(start, M.initial, (), begin, below=False)
    return start, end, [(s, c, it, S, t) for (s, c, it, t), S in edges.items()]


# -- embedding and entry point ---------------------------------------------------

def embed_items(items: tuple, index: dict, a: str, b: str) -> tuple:
    """Spell a product over M * B^(n) in M * B: the i-th push is a bⁱ a, its pop ā b̄ⁱ ā."""
    out = []
    for it in items:
        if isinstance(it[0], int):
            sign, sym = it
            i = index[sym]
            pos = sign > 0
            out += [GenSymbol(a, pos)] + [GenSymbol(b, pos)] * i + [GenSymbol(a, pos)]
        else:
            out += list(it)
    return tuple(out)


def eliminate_stack(T: VTransducer, plan, recurse, prefix_ops: int = PREFIX_OPS,
                    middle_ops: int = MIDDLE_OPS) -> SLTransducer:
    from .free_b import identity_outputs

    outer = plan.steps[0].vertex
    b = plan.inner.steps[0].vertex
    prep = prepare(T, plan, recurse)
    d = T.dim
    inner_graph = T.graph.without(outer)
    start, end, fused = fuse(prep, inner_graph, d, prefix_ops, middle_ops)
    total = len(fused)
    fused = trim_useless(fused, start, end)
    uses: dict = {}
    for _, _, items, _, _ in fused:
        for it in items:
            if isinstance(it[0], int):
                uses[it[1]] = uses.get(it[1], 0) + 1
    order = sorted(uses, key=lambda x: (-uses[x], repr(x)))
    index = {sym: i + 1 for i, sym in enumerate(order)}
    edges = [SLEdge(src, c, embed_items(items, index, outer, b), S, dst) for src, c, items, S, dst in fused]
    states = [start] + list(prep.machine.states) + [end]
    empty = identity_outputs(T.single_symbol(), set(T.graph.vertices))
    meta = {"construction": "stack", "vertex": outer, "symbols": len(index), "operations": len(prep.machine.loops),
            "fused_edges": total, "kept_edges": len(edges), "prefix_ops": prefix_ops, "middle_ops": middle_ops,
            "inner": dict(prep.Dh.metadata)}
    return SLTransducer(T.graph, T.alphabet, states, start, frozenset({end}), edges, empty, d, meta).trimmed()


# -- trimming --------------------------------------------------------------------

def _stack_ops(items: tuple) -> list:
    return [it for it in items if isinstance(it[0], int)]


def trim_useless(fused: list, start, end) -> list:
    """Keep the fused edges that lie on some run from ``start`` to ``end`` whose
    Θ-letters cancel completely (M-content is ignored, so this never drops a
    useful edge).

    Each edge becomes a chain of single pushes and pops; balanced-path
    summaries are tabulated from the start node and from every push target,
    then the summary for (start, end) is unfolded to find the steps it uses.
    """
    eps: dict = {}  # node -> [(dst, edge index)]
    push: dict = {}  # node -> [(sym, dst, step)]
    pop: dict = {}  # node -> [(sym, dst, step)]
    eps_back: dict = {}
    pop_back: dict = {}
    step_edge = []
    for k, (src, _, items, _, dst) in enumerate(fused):
        ops = _stack_ops(items)
        if not ops:
            eps.setdefault(src, []).append((dst, k))
            eps_back.setdefault(dst, []).append((src, k))
            continue
        prev = src
        for j, (sign, sym) in enumerate(ops):
            nxt = dst if j == len(ops) - 1 else ("~", k, j)
            step = len(step_edge)
            step_edge.append(k)
            if sign > 0:
                push.setdefault(prev, []).append((sym, nxt, step))
            else:
                pop.setdefault(prev, []).append((sym, nxt, step))
                pop_back.setdefault(nxt, []).append((sym, prev, step))
            prev = nxt
    summ: dict = {}
    callers: dict = {}  # push target -> [(u, sym, step)]
    work = deque()

    def add(u, v):
        s = summ.setdefault(u, set())
        if v not in s:
            s.add(v)
            work.append((u, v))

    add(start, start)
    while work:
        u, v = work.popleft()
        for x, _ in eps.get(v, ()):
            add(u, x)
        for sym, t, _ in push.get(v, ()):
            callers.setdefault(t, []).append((u, sym))
            if t not in summ:
                add(t, t)
            else:
                for w in list(summ[t]):
                    for sym2, x, _ in pop.get(w, ()):
                        if sym2 == sym:
                            add(u, x)
        for sym, x, _ in pop.get(v, ()):
            for u2, sym2 in callers.get(u, ()):
                if sym2 == sym:
                    add(u2, x)
    if end not in summ.get(start, ()):
        return []
    owners: dict = {}  # w -> summary sources t with w in summ[t]
    for t, ws in summ.items():
        for w in ws:
            owners.setdefault(w, []).append(t)
    # unfold the needed summaries
    used_steps: set = set()
    used_eps: set = set()
    needed = {(start, end)}
    stack = [(start, end)]
    push_into: dict = {}  # target -> [(src, sym, step)]
    for v, lst in push.items():
        for sym, t, step in lst:
            push_into.setdefault(t, []).append((v, sym, step))
    while stack:
        u, x = stack.pop()
        su = summ[u]
        for v, k in eps_back.get(x, ()):
            if v in su:
                used_eps.add(k)
                if (u, v) not in needed:
                    needed.add((u, v))
                    stack.append((u, v))
        for sym, w, pstep in pop_back.get(x, ()):
            for t in owners.get(w, ()):
                for v, sym2, qstep in push_into.get(t, ()):
                    if sym2 == sym and v in su:
                        used_steps.update((pstep, qstep))
                        for f in ((u, v), (t, w)):
                            if f not in needed:
                                needed.add(f)
                                stack.append(f)
    keep = used_eps | {step_edge[s] for s in used_steps}
    return [e for k, e in enumerate(fused) if k in keep]
