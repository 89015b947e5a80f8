"""Semilinear sets as a commutative idempotent semiring, and path sums over it.

Union is addition, Minkowski sum is multiplication, ``{0}`` is the unit.
On top of that we solve two kinds of systems exactly:

* regular path sums (least solution of a linear system, by elimination with
  the Kleene star ``(b + ⟨P⟩)* = {0} ∪ (b + ⟨P ∪ {b}⟩)``);
* Dyck path sums, the outputs of well-bracketed paths, as the least solution
  of a quadratic system.  Newton's iteration reaches the least solution of
  such a system over a commutative idempotent semiring after at most as many
  steps as there are variables; each step is a linear solve.

All sets here live in the integers domain.
"""

from __future__ import annotations

from itertools import product as iproduct
from typing import Iterable

import networkx as nx

from ..semilinear import INTEGERS, LinearSet, SemilinearSet, vadd, vsub

# coefficient budget of the bounded cone test used for simplification; a miss
# only means a redundant part or period is kept
CONE_BUDGET = 4


def zero_set(dim: int) -> SemilinearSet:
    return SemilinearSet(dim, (LinearSet((0,) * dim, (), INTEGERS),), INTEGERS)


def nothing(dim: int) -> SemilinearSet:
    return SemilinearSet(dim, (), INTEGERS)


def point(v) -> SemilinearSet:
    v = tuple(v)
    return SemilinearSet(len(v), (LinearSet(v, (), INTEGERS),), INTEGERS)


def lin(base, periods=()) -> SemilinearSet:
    base = tuple(base)
    periods = tuple(tuple(p) for p in periods if any(p))
    return SemilinearSet(len(base), (LinearSet(base, periods, INTEGERS),), INTEGERS)


def plus(S: SemilinearSet, T: SemilinearSet) -> SemilinearSet:
    """Minkowski sum."""
    if not S.parts or not T.parts:
        return nothing(S.dim)
    parts = [LinearSet(vadd(p.base, q.base), p.periods + q.periods, INTEGERS)
             for p in S.parts for q in T.parts]
    return simplify(SemilinearSet(S.dim, tuple(parts), INTEGERS))


def union(S: SemilinearSet, T: SemilinearSet) -> SemilinearSet:
    if not S.parts:
        return T
    if not T.parts:
        return S
    return simplify(SemilinearSet(S.dim, S.parts + T.parts, INTEGERS))


def union_all(sets: Iterable[SemilinearSet], dim: int) -> SemilinearSet:
    parts: list = []
    for S in sets:
        parts.extend(S.parts)
    return simplify(SemilinearSet(dim, tuple(parts), INTEGERS))


def star(S: SemilinearSet) -> SemilinearSet:
    """The submonoid generated by S."""
    out = zero_set(S.dim)
    for p in S.parts:
        if any(p.base):
            one = SemilinearSet(S.dim, (LinearSet((0,) * S.dim, (), INTEGERS),
                                        LinearSet(p.base, p.periods + (p.base,), INTEGERS)), INTEGERS)
        else:
            one = lin(p.base, p.periods)
        out = plus(out, one)
    return out


def to_integers(S: SemilinearSet) -> SemilinearSet:
    if S.domain == INTEGERS:
        return S
    return SemilinearSet(S.dim, tuple(LinearSet(p.base, p.periods, INTEGERS) for p in S.parts), INTEGERS)


# -- simplification ----------------------------------------------------------

def in_cone(v: tuple, periods: tuple, budget: int = CONE_BUDGET) -> bool:
    """v ∈ ⟨periods⟩ with at most ``budget`` summands (a sound under-test)."""
    if not any(v):
        return True
    if not periods:
        return False
    seen = set()
    frontier = {v}
    for _ in range(budget):
        nxt = set()
        for w in frontier:
            for p in periods:
                r = vsub(w, p)
                if not any(r):
                    return True
                if r not in seen:
                    seen.add(r)
                    nxt.add(r)
        frontier = nxt
        if len(frontier) > 4000:
            return False
    return False


def _part_within(p: LinearSet, q: LinearSet) -> bool:
    return (in_cone(vsub(p.base, q.base), q.periods)
            and all(in_cone(r, q.periods) for r in p.periods))


def _prune_part(p: LinearSet) -> LinearSet:
    per = list(p.periods)
    i = 0
    while i < len(per):
        others = tuple(per[:i] + per[i + 1:])
        if in_cone(per[i], others, 3):
            per.pop(i)
        else:
            i += 1
    return LinearSet(p.base, tuple(per), INTEGERS)


def simplify(S: SemilinearSet) -> SemilinearSet:
    parts = [_prune_part(p) for p in S.parts]
    parts = list({(p.base, p.periods): p for p in parts}.values())
    # larger parts first so that smaller ones can be absorbed
    parts.sort(key=lambda p: (-len(p.periods), p.base, p.periods))
    kept: list = []
    for p in parts:
        if any(_part_within(p, q) for q in kept):
            continue
        kept = [q for q in kept if not _part_within(q, p)] + [p]
    return SemilinearSet(S.dim, tuple(kept), INTEGERS)


def subset(S: SemilinearSet, T: SemilinearSet) -> bool:
    """Sound test of S ⊆ T: every part of S lies inside one part of T."""
    return all(any(_part_within(p, q) for q in T.parts) for p in S.parts)


def sample(S: SemilinearSet, coeff: int = 2) -> set:
    out = set()
    for p in S.parts:
        for cs in iproduct(range(coeff + 1), repeat=len(p.periods)):
            v = p.base
            for c, r in zip(cs, p.periods):
                if c:
                    v = vadd(v, tuple(c * x for x in r))
            out.add(v)
    return out


# -- linear systems ------------------------------------------------------------

def solve_linear(variables: list, A: dict, c: dict, dim: int) -> dict:
    """Least X with X_i = c_i ∪ ⋃_j A[i][j] + X_j.

    ``A`` maps i to a dict j -> set; missing entries are empty.  Variables are
    eliminated in the given order and recovered by back substitution.
    """
    A = {i: dict(A.get(i, {})) for i in variables}
    c = {i: c.get(i, nothing(dim)) for i in variables}
    rows = {}
    done = set()
    for k in variables:
        row = A.pop(k)
        loop = row.pop(k, None)
        s = star(loop) if loop is not None and loop.parts else zero_set(dim)
        row = {j: plus(s, a) for j, a in row.items() if a.parts}
        ck = plus(s, c[k])
        rows[k] = (row, ck)
        done.add(k)
        for i, arow in A.items():
            a = arow.pop(k, None)
            if a is None or not a.parts:
                continue
            c[i] = union(c[i], plus(a, ck))
            for j, akj in row.items():
                term = plus(a, akj)
                arow[j] = union(arow[j], term) if j in arow else term
    X = {}
    for k in reversed(variables):
        row, ck = rows[k]
        val = ck
        for j, a in row.items():
            val = union(val, plus(a, X[j]))
        X[k] = val
    return X


def path_sums(nodes: Iterable, edges: Iterable, dim: int, source, forward: bool = True) -> dict:
    """Outputs of all paths from ``source`` (forward) or into it (backward).

    ``edges`` are ``(src, SemilinearSet, dst)``.  The result maps every node
    to the union of the outputs of paths source → node (or node → source).
    """
    nodes = list(dict.fromkeys(nodes))
    A: dict = {n: {} for n in nodes}
    for s, S, t in edges:
        if not S.parts:
            continue
        i, j = (t, s) if forward else (s, t)
        A[i][j] = union(A[i][j], S) if j in A[i] else S
    # restrict to nodes connected to the source
    G = nx.DiGraph()
    G.add_nodes_from(nodes)
    for i, row in A.items():
        for j in row:
            G.add_edge(j, i)
    live = nx.descendants(G, source) | {source}
    order = [n for n in nodes if n in live]
    A = {i: {j: a for j, a in A[i].items() if j in live} for i in order}
    X = solve_linear(order, A, {source: zero_set(dim)}, dim)
    return {n: X.get(n, nothing(dim)) for n in nodes}


# -- Dyck path sums -----------------------------------------------------------

OPEN, CLOSE, NEUTRAL = "open", "close", "neutral"


def dyck_reach(nodes: Iterable, edges: list) -> set:
    """Pairs (u, v) joined by a well-bracketed path (boolean saturation)."""
    nodes = list(nodes)
    neutral = {}
    opens = {}
    closes = {}
    for s, kind, typ, S, t in edges:
        if not S.parts:
            continue
        if kind == NEUTRAL:
            neutral.setdefault(s, set()).add(t)
        elif kind == OPEN:
            opens.setdefault(s, []).append((typ, t))
        else:
            closes.setdefault(typ, []).append((s, t))
    reach = {(u, u) for u in nodes}
    steps = {u: set(neutral.get(u, ())) for u in nodes}
    changed = True
    while changed:
        changed = False
        # transitive closure of the current step relation
        G = nx.DiGraph()
        G.add_nodes_from(nodes)
        for u, ws in steps.items():
            for w in ws:
                G.add_edge(u, w)
        new_reach = {(u, u) for u in nodes}
        for u in nodes:
            for v in nx.descendants(G, u):
                new_reach.add((u, v))
        reach = new_reach
        for u, outs in opens.items():
            for typ, u2 in outs:
                for v2, w in closes.get(typ, ()):
                    if (u2, v2) in reach and w not in steps[u]:
                        steps[u].add(w)
                        changed = True
    return reach


def dyck_sums(nodes: Iterable, edges: list, dim: int) -> dict:
    """Outputs of well-bracketed paths for every connected pair (u, v).

    ``edges`` are ``(src, kind, type, SemilinearSet, dst)`` with kind one of
    OPEN, CLOSE, NEUTRAL.  Grammar, for each pair::

        X_uv ⊇ {0}                          if u = v
        X_uv ⊇ o + X_wv                     neutral u → w
        X_uv ⊇ o₁ + o₂ + X_u'v' + X_wv      open u → u', close v' → w, same type
    """
    nodes = list(dict.fromkeys(nodes))
    reach = dyck_reach(nodes, edges)
    if dim == 0:
        return {pair: zero_set(0) for pair in reach}
    neutral_from: dict = {}
    open_from: dict = {}
    close_typ: dict = {}
    for s, kind, typ, S, t in edges:
        if not S.parts:
            continue
        if kind == NEUTRAL:
            neutral_from.setdefault(s, []).append((S, t))
        elif kind == OPEN:
            open_from.setdefault(s, []).append((typ, S, t))
        else:
            close_typ.setdefault(typ, []).append((s, S, t))
    targets: dict = {}
    for u, v in reach:
        targets.setdefault(u, set()).add(v)
    # terms per variable: constants, linear (coef, var), quadratic (coef, var, var)
    const: dict = {}
    linear: dict = {}
    quad: dict = {}
    for u, v in reach:
        key = (u, v)
        if u == v:
            const[key] = zero_set(dim)
        for S, w in neutral_from.get(u, ()):
            if (w, v) in reach:
                linear.setdefault(key, []).append((S, (w, v)))
        for typ, S1, u2 in open_from.get(u, ()):
            for v2, S2, w in close_typ.get(typ, ()):
                if (u2, v2) in reach and (w, v) in reach:
                    quad.setdefault(key, []).append((plus(S1, S2), (u2, v2), (w, v)))
    G = nx.DiGraph()
    G.add_nodes_from(reach)
    for key, terms in linear.items():
        for _, a in terms:
            G.add_edge(key, a)
    for key, terms in quad.items():
        for _, a, b in terms:
            G.add_edge(key, a)
            G.add_edge(key, b)
    C = nx.condensation(G)
    solved: dict = {}
    for comp in reversed(list(nx.topological_sort(C))):
        members = list(C.nodes[comp]["members"])
        solved.update(_newton(members, const, linear, quad, solved, dim))
    return solved


def _newton(members: list, const: dict, linear: dict, quad: dict, known: dict, dim: int) -> dict:
    inside = set(members)

    def val(nu, a):
        return nu[a] if a in inside else known[a]

    nu = {m: nothing(dim) for m in members}
    for _ in range(len(members) + 1):
        F = {}
        A: dict = {m: {} for m in members}
        for m in members:
            acc = const.get(m, nothing(dim))
            for S, a in linear.get(m, ()):
                acc = union(acc, plus(S, val(nu, a)))
                if a in inside:
                    A[m][a] = union(A[m][a], S) if a in A[m] else S
            for S, a, b in quad.get(m, ()):
                va, vb = val(nu, a), val(nu, b)
                acc = union(acc, plus(plus(S, va), vb))
                if a in inside and vb.parts:
                    t = plus(S, vb)
                    A[m][a] = union(A[m][a], t) if a in A[m] else t
                if b in inside and va.parts:
                    t = plus(S, va)
                    A[m][b] = union(A[m][b], t) if b in A[m] else t
            F[m] = acc
        new = solve_linear(members, A, F, dim)
        new = {m: union(new[m], nu[m]) for m in members}
        if all(subset(new[m], nu[m]) for m in members):
            return nu
        nu = new
    return nu
