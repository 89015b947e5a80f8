"""λ-elimination over B (one partially blind counter) with output in ℤ^d.

Steps:

1. For every letter x, the paths p →λ* →x →λ* q form a label graph.  Paths
   whose storage word reduces to 1 are summarised by their output sets
   (Dyck path sums), so every path can be rewritten as ā-steps followed by
   a-steps.  This gives edge forms (p, x, L·R, q) with L ⊆ ā^⊕ × ℤ^d and
   R ⊆ a^⊕ × ℤ^d semilinear; each form is a pair of linear parts.
2. Each new edge combines the R-part of the previous step with the L-part
   of the current one: storage a^k ā^n, output base c, counter-moving
   periods R (a-side) and L (ā-side).  Periods that do not move the counter
   go straight into the output.
3. R̃ collects R-periods seen so far (usable later), L̃ holds guessed
   L-periods still to come (usable earlier); the final state needs L̃ = ∅.
4. An edge with periods Y = R ∪ R̃ and Z = L ∪ L̃ only needs net counter
   shifts i with b < i < B, where b = min{-1, ψ(z)+n-k}, B = max{1, ψ(y)+n-k}
   and ψ counts a positively and ā negatively.  For each i it outputs
   c + C_i with C_i the outputs of multisets over Y ∪ Z of ψ-value i.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from ..graph_core import GenSymbol, StorageGraph
from ..semilinear import LinearSet, SemilinearSet, WeightMap, preimage_semilinear, sl_image
from . import slalg
from .transducer import SLEdge, SLTransducer, VTransducer, power_word

GUESS_LIMIT = 14  # at most 2**GUESS_LIMIT initial guesses for L̃
FIN = "fin"


def bracket_edges(edges, vertices) -> list:
    """Label edges (src, sym, SL, dst) as Dyck edges over the given unlooped vertices."""
    out = []
    for s, sym, S, t in edges:
        if sym is None:
            out.append((s, slalg.NEUTRAL, None, S, t))
        elif sym.vertex in vertices:
            out.append((s, slalg.OPEN if sym.positive else slalg.CLOSE, sym.vertex, S, t))
        else:
            raise ValueError(f"symbol {sym} is not a bracket")
    return out


def letter_graph(T: VTransducer, x: str | None):
    """Nodes and edges of the label graph for p →λ* →x →λ* q (layers 0 and 1)."""
    lam = [e for e in T.edges if not e.letter]
    layers = (0, 1) if x is not None else (0,)
    nodes = [(q, ph) for ph in layers for q in T.states]
    edges = []
    for ph in layers:
        for e in lam:
            edges.append(((e.src, ph), e.word[0] if e.word else None, slalg.point(e.out), (e.dst, ph)))
    if x is not None:
        for e in T.edges:
            if e.letter == x:
                edges.append(((e.src, 0), e.word[0] if e.word else None, slalg.point(e.out), (e.dst, 1)))
    return nodes, edges


def _lift(S: SemilinearSet, count: int = 0) -> SemilinearSet:
    """Prepend a counter coordinate."""
    parts = tuple(LinearSet((count,) + p.base, tuple((0,) + q for q in p.periods), p.domain) for p in S.parts)
    return SemilinearSet(S.dim + 1, parts, S.domain)


def split_forms(nodes, edges, K, d, starts, ends):
    """L- and R-path sums in the rewritten label graph.

    Returns ``(Ls, Rs)`` with ``Ls[p][s]`` the (ā-count, output) set of paths
    from p to s using ā-steps and glued identity paths, and ``Rs[q][s]`` the
    (a-count, output) set of paths from s to q using a-steps and glued paths.
    """
    glued = [(u, _lift(S), w) for (u, w), S in K.items()]
    bars = [(s, _lift(S, 1), t) for s, sym, S, t in edges if sym is not None and not sym.positive]
    ups = [(s, _lift(S, 1), t) for s, sym, S, t in edges if sym is not None and sym.positive]
    Ls = {p: slalg.path_sums(nodes, bars + glued, d + 1, p, forward=True) for p in starts}
    Rs = {q: slalg.path_sums(nodes, ups + glued, d + 1, q, forward=False) for q in ends}
    return Ls, Rs


def _side(part: LinearSet):
    """(count, output base, counter periods, output-only periods)."""
    moving = tuple(p for p in part.periods if p[0])
    still = tuple(p[1:] for p in part.periods if not p[0] and any(p[1:]))
    return part.base[0], part.base[1:], moving, still


def anchors(T: VTransducer) -> list:
    """States where a λ-free run can stand: the initial state, finals, and sources of letter edges.

    Any run can be cut so that each letter's λ-paths end right where the next
    letter edge starts, so edge forms need no other endpoints.
    """
    keep = {T.initial} | set(T.finals) | {e.src for e in T.edges if e.letter}
    return [q for q in T.states if q in keep]


def edge_forms(T: VTransducer):
    """All (p, x, L-part, R-part, q) forms of the rewritten rational labelling."""
    d = T.dim
    forms = []
    vertices = {T.graph.vertices[0]}
    anchor = anchors(T)
    for x in T.alphabet:
        nodes, edges = letter_graph(T, x)
        K = slalg.dyck_sums(nodes, bracket_edges(edges, vertices), d)
        starts = [(p, 0) for p in anchor]
        ends = [(q, 1) for q in anchor]
        Ls, Rs = split_forms(nodes, edges, K, d, starts, ends)
        seen = set()
        for (p, _), Lp in Ls.items():
            for (q, _), Rq in Rs.items():
                for s in nodes:
                    for lp in Lp[s].parts:
                        for rp in Rq[s].parts:
                            key = (p, x, lp.base, lp.periods, rp.base, rp.periods, q)
                            if key not in seen:
                                seen.add(key)
                                forms.append((p, x, _side(lp), _side(rp), q))
    return forms


def identity_outputs(T: VTransducer, vertices) -> SemilinearSet:
    """Outputs of λ-paths from the initial to a final state with storage product 1."""
    nodes, edges = letter_graph(T, None)
    K = slalg.dyck_sums(nodes, bracket_edges(edges, vertices), T.dim)
    return slalg.union_all([K[(T.initial, 0), (f, 0)] for f in T.finals if ((T.initial, 0), (f, 0)) in K],
                           T.dim)


@lru_cache(maxsize=None)
def c_set(Y: frozenset, Z: frozenset, i: int, d: int) -> SemilinearSet:
    """Outputs of multisets over Y ∪ Z whose counter shift is i.

    Periods are vectors (shift, output...); a Y-period moves the counter by
    its first entry, a Z-period by minus its first entry.
    """
    syms = sorted(Y) + sorted(Z)
    weights = [y[0] for y in sorted(Y)] + [-z[0] for z in sorted(Z)]
    if not syms:
        return slalg.zero_set(d) if i == 0 else slalg.nothing(d)
    pre = preimage_semilinear(WeightMap(tuple(range(len(syms))), tuple(weights)), i)
    return slalg.simplify(sl_image(pre, [s[1:] for s in syms], d))


def eliminate_b(T: VTransducer, vertex: str) -> SLTransducer:
    g = T.graph
    if len(g.vertices) != 1 or g.is_looped(vertex):
        raise ValueError("expected storage B on a single unlooped vertex")
    T = T.single_symbol()
    d = T.dim
    forms = edge_forms(T)
    by_src: dict = {}
    for f in forms:
        by_src.setdefault(f[0], []).append(f)
    universe = sorted({z for f in forms for z in f[2][2]})
    if len(universe) > GUESS_LIMIT:
        raise RuntimeError(f"{len(universe)} counter periods on the ā-side; too many guesses")

    init = ("init",)
    start_pend = (0, ())
    starts = []
    for r in range(len(universe) + 1):
        for Lt in combinations(universe, r):
            starts.append((T.initial, start_pend, frozenset(), frozenset(Lt)))
    states = set(starts) | {init}
    stack = list(starts)
    out_edges: dict = {}

    def emit(src, letter, word, out, dst):
        key = (src, letter, word, dst)
        out_edges[key] = slalg.union(out_edges[key], out) if key in out_edges else out

    while stack:
        st = stack.pop()
        q, pend, Rt, Lt = st
        if pend == FIN:
            continue
        k, Rc = pend
        for _, x, lside, rside, q2 in by_src.get(q, ()):
            n, lout, Lc, Ln = lside
            k2, rout, Rc2, Rn = rside
            Y = Rt | frozenset(Rc)
            Z = Lt | frozenset(Lc)
            c = tuple(a + b for a, b in zip(lout, rout))
            base = slalg.lin(c, Ln + Rn)
            lo = min([-1] + [-z[0] + n - k for z in Z])
            hi = max([1] + [y[0] + n - k for y in Y])
            steps = []
            for i in range(lo + 1, hi):
                Ci = c_set(Y, Z, i, d)
                if Ci.parts:
                    steps.append((power_word(vertex, k + i - n), slalg.plus(base, Ci)))
            if not steps:
                continue
            removable = sorted(frozenset(Lc) & Lt)
            for r in range(len(removable) + 1):
                for X in combinations(removable, r):
                    Lt2 = Lt - frozenset(X)
                    targets = [(q2, (k2, Rc2), Y, Lt2)]
                    if k2 == 0:
                        targets.append((q2, FIN, Y, Lt2))
                    for dst in targets:
                        if dst not in states:
                            states.add(dst)
                            stack.append(dst)
                        for word, out in steps:
                            emit(st, x, word, out, dst)
    starts_set = set(starts)
    edges = [SLEdge(s, x, w, o, t) for (s, x, w, t), o in out_edges.items()]
    edges += [SLEdge(init, x, w, o, t) for (s, x, w, t), o in out_edges.items() if s in starts_set]
    finals = frozenset(s for s in states if s != init and s[1] == FIN and s[0] in T.finals and not s[3])
    empty = identity_outputs(T, {vertex})
    meta = {"construction": "free_b", "vertex": vertex, "forms": len(forms), "guess_universe": len(universe)}
    return SLTransducer(g, T.alphabet, sorted(states, key=repr), init, finals, edges, empty, d, meta).trimmed()
