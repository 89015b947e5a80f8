"""λ-elimination for M × ℤ, given λ-elimination for M.

The ℤ component is central, so it can be moved into the output: eliminate
over M with one more output coordinate, then turn that coordinate back into
storage.  Each edge's output set b + ⟨P⟩ has periods with nonzero ℤ-part;
the machine guesses the set S̃ of such periods used in the whole run, checks
the guess by the end, and lets every edge apply a bounded multiset ν over S̃
on the counter.  By the small-preimage bound, |ν| ≤ k·B per edge suffices
with k = m + 2 (m the largest |ℤ-part| in S̃) and B the largest |ℤ-part| of
an edge base; whatever is left has ℤ-sum zero and comes out of the kernel of
the ℤ-projection, which is output directly.
"""

from __future__ import annotations

from ..semilinear import WeightMap, preimage_semilinear, sl_slice
from . import slalg
from .transducer import SLEdge, SLTransducer, VEdge, VTransducer, power_word

GUESS_CAP = 4096


def eliminate_times_z(T: VTransducer, plan, recurse) -> SLTransducer:
    g = plan.steps[0].vertex
    d = T.dim
    inner_graph = T.graph.without(g)
    edges = []
    for e in T.edges:
        net = sum(1 if x.positive else -1 for x in e.word if x.vertex == g)
        rest = tuple(x for x in e.word if x.vertex != g)
        edges.append(VEdge(e.src, e.letter, rest, tuple(e.out) + (net,), e.dst))
    inner_T = VTransducer(inner_graph, T.alphabet, list(T.states), T.initial, T.finals, edges, d + 1)
    S = recurse(inner_T, plan.inner).trimmed()

    def proj(v):
        return tuple(v[:d])

    # per edge part: base, periods touching ℤ, periods that do not
    forms = []
    for e in S.edges:
        for part in e.out.parts:
            pz = frozenset(p for p in part.periods if p[d])
            p0 = tuple(proj(p) for p in part.periods if not p[d])
            forms.append((e, part.base, pz, p0))
    bound_b = max((abs(b[d]) for _, b, _, _ in forms), default=0)

    guesses = {frozenset()}
    frontier = [frozenset()]
    pz_sets = {pz for _, _, pz, _ in forms if pz}
    while frontier:
        nxt = []
        for cand in frontier:
            for pz in pz_sets:
                u = cand | pz
                if u not in guesses:
                    guesses.add(u)
                    nxt.append(u)
        frontier = nxt
        if len(guesses) > GUESS_CAP:
            raise RuntimeError(f"more than {GUESS_CAP} period guesses; machine too large")

    by_src: dict = {}
    for f in forms:
        by_src.setdefault(f[0].src, []).append(f)

    shifts: dict = {}
    kernels: dict = {}

    def shift_table(guess):
        """(ℤ-sum, projected sum) of all multisets over the guess of size ≤ k·B."""
        if guess not in shifts:
            per = sorted(guess)
            m = max((abs(p[d]) for p in per), default=0)
            size = (m + 2) * bound_b
            seen = {(0, (0,) * d)}
            layer = set(seen)
            for _ in range(size):
                layer = {(z + p[d], tuple(a + b for a, b in zip(o, proj(p)))) for z, o in layer for p in per}
                layer -= seen
                seen |= layer
                if not layer:
                    break
            shifts[guess] = sorted(seen)
            # the kernel of the ℤ-projection restricted to the guess
            H = set()
            if per:
                pre = preimage_semilinear(WeightMap(tuple(range(len(per))), tuple(p[d] for p in per)), 0)
                for part in pre.parts:
                    for vec in (part.base,) + part.periods:
                        if any(vec):
                            img = [0] * d
                            for c, p in zip(vec, per):
                                for j in range(d):
                                    img[j] += c * p[j]
                            if any(img):
                                H.add(tuple(img))
            kernels[guess] = tuple(sorted(H))
        return shifts[guess], kernels[guess]

    init = ("init",)
    starts = [(S.initial, guess, frozenset()) for guess in guesses]
    states = {init}
    out_edges: dict = {}
    stack = list(starts)
    states.update(starts)
    while stack:
        st = stack.pop()
        q, guess, seen = st
        table, H = shift_table(guess)
        for e, base, pz, p0 in by_src.get(q, ()):
            if not pz <= guess:
                continue
            dst = (e.dst, guess, seen | pz)
            if dst not in states:
                states.add(dst)
                stack.append(dst)
            for zs, os in table:
                word = tuple(e.word) + power_word(g, base[d] + zs)
                out = slalg.lin(tuple(a + b for a, b in zip(proj(base), os)), p0 + H)
                key = (st, e.letter, word, dst)
                out_edges[key] = slalg.union(out_edges[key], out) if key in out_edges else out
    final_edges = [SLEdge(src, x, w, out, dst) for (src, x, w, dst), out in out_edges.items()]
    for st in starts:
        for (src, x, w, dst), out in list(out_edges.items()):
            if src == st:
                final_edges.append(SLEdge(init, x, w, out, dst))
    finals = frozenset(s for s in states if s != init and s[0] in S.finals and s[1] == s[2])
    empty = slalg.simplify(slalg.to_integers(sl_slice(S.empty_outputs, d, 0)))
    meta = dict(S.metadata)
    meta.update({"construction": "times_z", "vertex": g, "guesses": len(guesses), "base_bound": bound_b})
    return SLTransducer(T.graph, T.alphabet, sorted(states, key=repr), init, finals, final_edges, empty, d,
                        meta).trimmed()
