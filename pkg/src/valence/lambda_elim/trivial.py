"""λ-elimination when the storage is trivial: ε-closure with output sums."""

from __future__ import annotations

from . import slalg
from .transducer import SLEdge, SLTransducer, VTransducer


def eliminate_trivial(T: VTransducer) -> SLTransducer:
    """Edge (p, x, q) outputs every λ*·x·λ* path sum from p to q."""
    if T.graph.vertices and any(e.word for e in T.edges):
        raise ValueError("storage words on a machine treated as storage-free")
    d = T.dim
    lam = [(e.src, slalg.point(e.out), e.dst) for e in T.edges if not e.letter]
    reach = {q: slalg.path_sums(T.states, lam, d, q) for q in T.states}  # reach[p][s]: p →λ* s
    edges = []
    for x in T.alphabet:
        letter_edges = [e for e in T.edges if e.letter == x]
        for p in T.states:
            acc: dict = {}
            for e in letter_edges:
                pre = reach[p][e.src]
                if not pre.parts:
                    continue
                mid = slalg.plus(pre, slalg.point(e.out))
                for q, post in reach[e.dst].items():
                    if post.parts:
                        term = slalg.plus(mid, post)
                        acc[q] = slalg.union(acc[q], term) if q in acc else term
            for q, S in acc.items():
                edges.append(SLEdge(p, x, (), S, q))
    empty = slalg.union_all([reach[T.initial][f] for f in T.finals], d)
    return SLTransducer(T.graph, T.alphabet, list(T.states), T.initial, T.finals, edges, empty, d,
                        {"construction": "trivial"})
