"""Which graphs admit λ-elimination, and how their monoids are built.

A graph is in C when its looped vertices form a clique, its unlooped
vertices an anti-clique, and no induced path u–x–y–v has looped middle
vertices x, y and unlooped ends u, v.  Such a graph decomposes by repeatedly
removing either a looped vertex adjacent to everything (a direct factor ℤ)
or an isolated unlooped vertex (a free factor B).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Sequence

from ..graph_core import GenSymbol, StorageGraph


class ClassificationError(ValueError):
    """The graph is outside C; ``witness`` is the offending vertex tuple if known."""

    def __init__(self, message: str, witness: tuple | None = None):
        self.witness = witness
        super().__init__(message)


@dataclass(frozen=True)
class ClassificationResult:
    hypothesis_ok: bool
    forbidden_path: tuple | None
    in_C: bool
    p4_underlying: tuple | None = None

    def lines(self) -> list:
        out = [f"hypothesis: {'ok' if self.hypothesis_ok else 'violated'}"]
        out.append("forbidden_path: " + (" ".join(self.forbidden_path) if self.forbidden_path else "none"))
        out.append("p4_underlying: " + (" ".join(self.p4_underlying) if self.p4_underlying else "none"))
        out.append(f"in_C: {'yes' if self.in_C else 'no'}")
        return out


def _induced_p4(g: StorageGraph, a: str, b: str, c: str, d: str) -> bool:
    adj = g.adjacent
    return (adj(a, b) and adj(b, c) and adj(c, d)
            and not adj(a, c) and not adj(b, d) and not adj(a, d))


def classify(g: StorageGraph) -> ClassificationResult:
    looped = [v for v in g.vertices if g.is_looped(v)]
    unlooped = [v for v in g.vertices if not g.is_looped(v)]
    ok = all(g.adjacent(x, y) for x, y in combinations(looped, 2))
    ok = ok and not any(g.adjacent(u, v) for u, v in combinations(unlooped, 2))
    forbidden = None
    # vertex lists are in declaration order, so the loops run lexicographically by index
    for u in unlooped:
        for x in looped:
            if not g.adjacent(u, x):
                continue
            for y in looped:
                if y == x or not g.adjacent(x, y) or g.adjacent(u, y):
                    continue
                for v in unlooped:
                    if v != u and g.adjacent(y, v) and _induced_p4(g, u, x, y, v):
                        cand = (u, x, y, v)
                        key = tuple(g.index(t) for t in cand)
                        if forbidden is None or key < tuple(g.index(t) for t in forbidden):
                            forbidden = cand
    p4 = None
    for cand in permutations(g.vertices, 4):
        if g.index(cand[0]) > g.index(cand[3]):
            continue  # each path once, read from its lower-index end
        if _induced_p4(g, *cand):
            p4 = cand
            break
    return ClassificationResult(ok, forbidden, ok and forbidden is None, p4)


# -- decomposition ---------------------------------------------------------

@dataclass(frozen=True)
class TimesZ:
    vertex: str

    def __str__(self) -> str:
        return f"TimesZ({self.vertex})"


@dataclass(frozen=True)
class FreeB:
    vertex: str

    def __str__(self) -> str:
        return f"FreeB({self.vertex})"


@dataclass(frozen=True)
class DecompositionPlan:
    """Steps in removal order; ``steps[0]`` is the outermost factor."""

    steps: tuple

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @property
    def inner(self) -> "DecompositionPlan":
        return DecompositionPlan(self.steps[1:])

    def replay(self) -> StorageGraph:
        vertices: list = []
        looped: set = set()
        edges: set = set()
        for step in reversed(self.steps):
            v = step.vertex
            if isinstance(step, TimesZ):
                edges |= {frozenset((v, u)) for u in vertices}
                looped.add(v)
            vertices.append(v)
        return StorageGraph(tuple(vertices), frozenset(looped), frozenset(edges))

    def describe(self) -> str:
        """Monoid expression, innermost factor first, e.g. ``(B * B) x Z``."""
        expr = "1"
        for step in reversed(self.steps):
            if isinstance(step, TimesZ):
                expr = "Z" if expr == "1" else f"{_wrap(expr)} x Z"
            else:
                expr = "B" if expr == "1" else f"{_wrap(expr)} * B"
        return expr

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.steps)) + "]"


def _wrap(expr: str) -> str:
    return expr if " " not in expr else f"({expr})"


def decompose(g: StorageGraph) -> DecompositionPlan:
    res = classify(g)
    if not res.in_C:
        if res.forbidden_path:
            raise ClassificationError(
                "graph contains the induced path " + "-".join(res.forbidden_path)
                + " (unlooped, looped, looped, unlooped)", res.forbidden_path)
        raise ClassificationError("looped vertices must be pairwise adjacent and unlooped ones pairwise non-adjacent")
    steps = []
    cur = g
    while cur.vertices:
        looped = [v for v in cur.vertices if cur.is_looped(v)]
        unlooped = set(cur.unlooped)
        if not looped:
            steps.extend(FreeB(u) for u in cur.unlooped)
            break
        nu = {x: cur.neighbours(x) & unlooped for x in looped}
        best = looped[0]
        for x in looped[1:]:
            if nu[x] > nu[best]:
                best = x
            elif not nu[x] <= nu[best]:
                u = min(nu[best] - nu[x], key=cur.index)
                v = min(nu[x] - nu[best], key=cur.index)
                raise ClassificationError("unlooped neighbourhoods are not totally ordered", (u, best, x, v))
        for x in looped:
            if not nu[x] <= nu[best]:
                u = min(nu[best] - nu[x], key=cur.index) if nu[best] - nu[x] else None
                v = min(nu[x] - nu[best], key=cur.index)
                raise ClassificationError("unlooped neighbourhoods are not totally ordered", (u, best, x, v))
        if nu[best] == unlooped:
            steps.append(TimesZ(best))
            cur = cur.without(best)
        else:
            isolated = [u for u in cur.unlooped if u not in nu[best]]
            # the greatest neighbourhood misses u, so every looped vertex does
            u = isolated[0]
            steps.append(FreeB(u))
            cur = cur.without(u)
    return DecompositionPlan(tuple(steps))


# -- a direct evaluator along the plan -----------------------------------

def evaluate(plan: DecompositionPlan, w: Sequence[GenSymbol]):
    """Canonical value of ``w`` computed from the product structure alone.

    ×ℤ contributes an integer sum; *B is evaluated as a stack of frames where
    each frame holds a word of the inner monoid.  Two words are equal in MΓ
    iff their values are equal.
    """
    w = tuple(w)
    if not plan.steps:
        if w:
            raise ValueError(f"symbol {w[0]} does not belong to the trivial monoid")
        return ()
    step, inner = plan.steps[0], plan.inner
    v = step.vertex
    if isinstance(step, TimesZ):
        rest = tuple(x for x in w if x.vertex != v)
        net = sum(1 if x.positive else -1 for x in w if x.vertex == v)
        return ("Z", evaluate(inner, rest), net)
    return ("B", _free_value(inner, _free_parts(inner, v, w)))


def _free_parts(inner: DecompositionPlan, v: str, w: tuple) -> list:
    """Reduced free-product factorisation of ``w`` in M * B.

    The list alternates inner words and blocks ``("b", k, l)`` standing for
    ā^k a^l, starting and ending with an inner word.  Inner words strictly
    between two blocks are never the identity, which makes the factorisation
    unique up to equality of the inner words.
    """
    one = evaluate(inner, ())
    parts: list = [()]
    for x in w:
        if x.vertex != v:
            parts[-1] = parts[-1] + (x,)
            continue
        if len(parts) > 1 and evaluate(inner, parts[-1]) == one:
            # the trailing inner word is trivial: x acts on the block before it
            parts.pop()
            _, k, l = parts.pop()
            if x.positive:
                l += 1
            elif l:
                l -= 1
            else:
                k += 1
            if k or l:
                parts.extend([("b", k, l), ()])
        else:
            parts.extend([("b", 0, 1) if x.positive else ("b", 1, 0), ()])
    return parts


def _free_value(inner: DecompositionPlan, parts: list) -> tuple:
    return tuple(p if p and p[0] == "b" else evaluate(inner, p) for p in parts)


def plan_is_identity(plan: DecompositionPlan, w: Sequence[GenSymbol]) -> bool:
    return evaluate(plan, w) == evaluate(plan, ())


# -- J(M), L(M), R(M), U(M) ----------------------------------------------

@dataclass(frozen=True)
class ElementClass:
    is_unit: bool
    is_left_invertible: bool
    is_right_invertible: bool
    is_J: bool

    def labels(self) -> list:
        names = [("unit", self.is_unit), ("left-invertible", self.is_left_invertible),
                 ("right-invertible", self.is_right_invertible), ("J", self.is_J)]
        return [n for n, flag in names if flag]


_UNIT = ElementClass(True, True, True, True)


def element_class(plan: DecompositionPlan, w: Sequence[GenSymbol]) -> ElementClass:
    """Classify ``w`` recursively: ℤ is a group, and in M * B an element

    m₁ā⋯m_kā m a m′₁⋯a m′_ℓ is in J iff every mᵢ ∈ L(M), m ∈ J(M) and every
    m′ⱼ ∈ R(M); it is left-invertible iff ℓ = 0 and mᵢ, m ∈ L(M); right-
    invertible iff k = 0 and m, m′ⱼ ∈ R(M).
    """
    w = tuple(w)
    if not plan.steps:
        return _UNIT
    step, inner = plan.steps[0], plan.inner
    if isinstance(step, TimesZ):
        return element_class(inner, tuple(x for x in w if x.vertex != step.vertex))
    parts = _free_parts(inner, step.vertex, w)
    # spell the blocks out letter by letter with empty inner words between
    words = [parts[0]]
    letters = []
    for i in range(1, len(parts), 2):
        _, k, l = parts[i]
        for j, positive in enumerate([False] * k + [True] * l):
            letters.append(positive)
            words.append(parts[i + 1] if j == k + l - 1 else ())
    k = 0
    while k < len(letters) and not letters[k]:
        k += 1
    if any(not p for p in letters[k:]):
        # some a is followed by an ā with a non-trivial inner word between them
        return ElementClass(False, False, False, False)
    ell = len(letters) - k
    classes = [element_class(inner, u) for u in words]
    left_parts, middle, right_parts = classes[:k], classes[k], classes[k + 1:]
    is_j = (all(c.is_left_invertible for c in left_parts) and middle.is_J
            and all(c.is_right_invertible for c in right_parts))
    left = ell == 0 and all(c.is_left_invertible for c in left_parts) and middle.is_left_invertible
    right = k == 0 and middle.is_right_invertible and all(c.is_right_invertible for c in right_parts)
    return ElementClass(left and right, left, right, is_j)
