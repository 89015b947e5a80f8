"""Fooling-set lower bound for λ-free machines over B^r × ℤ^s.

L₁ = { u cⁿ : u ∈ {0,1}*, n ≤ bin(u) } has a fooling set of size 2ⁿ for
prefixes of length n, while a λ-free machine with k states whose edge
elements have norm ≤ m can only reach k·(m·n+1)^r·(2·m·n+1)^s classes of
right-invertible storage contents after n steps.  Exponential beats
polynomial, so for r ≥ 2 some n separates them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .graph_core import GenSymbol, StorageGraph

FOOLING_CAP = 16
F_EXACT_CAP = 2_000_000


class LowerBoundError(ValueError):
    pass


def bin_value(w: str) -> int:
    """bin(λ)=0, bin(w0)=2·bin(w), bin(w1)=2·bin(w)+1."""
    v = 0
    for ch in w:
        if ch not in "01":
            raise LowerBoundError(f"not a binary digit: {ch!r}")
        v = 2 * v + (ch == "1")
    return v


def l1_member(w: str) -> bool:
    u = w.rstrip("c")
    if any(ch not in "01" for ch in u):
        return False
    return len(w) - len(u) <= bin_value(u)


def fooling_set_l1(n: int) -> list:
    if n > FOOLING_CAP:
        raise LowerBoundError(f"fooling sets are capped at n = {FOOLING_CAP}")
    return [("".join(bits), "c" * bin_value("".join(bits))) for bits in product("01", repeat=n)]


def fooling_set_valid(pairs: Sequence[tuple], exhaustive_limit: int = 256) -> bool:
    """Every u·v is in L₁, and every mixed pair fails on at least one side.

    Up to ``exhaustive_limit`` pairs every combination is tested.  Larger sets
    of the shape (u, c^t) use the largest accepted count of each prefix,
    found by probing ``l1_member`` with doubling and bisection; this is exact because u·c^t ∈ L₁
    is downward closed in t.
    """
    if not all(l1_member(u + v) for u, v in pairs):
        return False
    if len(pairs) > exhaustive_limit and all(set(v) <= {"c"} for _, v in pairs):
        top = []
        for u, _ in pairs:
            hi = 1
            while l1_member(u + "c" * hi):
                hi *= 2
            lo = hi // 2  # accepted (or 0); hi rejected
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if l1_member(u + "c" * mid):
                    lo = mid
                else:
                    hi = mid
            top.append(lo)
        counts = sorted(len(v) for _, v in pairs)
        if len(set(counts)) != len(counts):
            return False
        # (u_i, c^t_i), (u_j, c^t_j) fool iff t_j > top_i or t_i > top_j
        order = sorted(range(len(pairs)), key=lambda i: len(pairs[i][1]))
        for pos, i in enumerate(order[:-1]):
            # the pair with the next larger count is the hardest to fool against u_i
            if len(pairs[order[pos + 1]][1]) <= top[i]:
                return False
        return True
    for i, (u1, v1) in enumerate(pairs):
        for u2, v2 in pairs[i + 1:]:
            if l1_member(u1 + v2) and l1_member(u2 + v1):
                return False
            lo, hi = sorted([(u1, v1), (u2, v2)], key=lambda p: bin_value(p[0]))
            if bin_value(lo[0]) < bin_value(hi[0]) and l1_member(lo[0] + hi[1]):
                return False
    return True


def f_upper_bound(r: int, s: int, m: int, n: int) -> int:
    if min(r, s, m, n) < 0:
        raise LowerBoundError("parameters must be nonnegative")
    return (m * n + 1) ** r * (2 * m * n + 1) ** s


# -- B^r × ℤ^s arithmetic --------------------------------------------------

@dataclass(frozen=True, order=True)
class BZElement:
    """ā^k a^ℓ per B factor plus one integer per ℤ factor."""

    b_parts: tuple
    z_parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "b_parts", tuple((int(k), int(l)) for k, l in self.b_parts))
        object.__setattr__(self, "z_parts", tuple(int(z) for z in self.z_parts))
        if any(k < 0 or l < 0 for k, l in self.b_parts):
            raise LowerBoundError("B components are pairs of naturals")

    def __mul__(self, other: "BZElement") -> "BZElement":
        parts = []
        for (k1, l1), (k2, l2) in zip(self.b_parts, other.b_parts):
            if l1 >= k2:
                parts.append((k1, l1 - k2 + l2))
            else:
                parts.append((k1 + k2 - l1, l2))
        return BZElement(tuple(parts), tuple(a + b for a, b in zip(self.z_parts, other.z_parts)))

    @property
    def right_invertible(self) -> bool:
        return all(k == 0 for k, _ in self.b_parts)

    @property
    def is_unit(self) -> bool:
        return all(k == 0 and l == 0 for k, l in self.b_parts) and not any(self.z_parts)

    @property
    def norm(self) -> int:
        return max([l for _, l in self.b_parts] + [abs(z) for z in self.z_parts], default=0)

    @classmethod
    def one(cls, r: int, s: int) -> "BZElement":
        return cls(((0, 0),) * r, (0,) * s)


def f_exact(S: Iterable[BZElement], n: int, r: int, s: int, cap: int = F_EXACT_CAP) -> int:
    """Number of right-invertible elements of Sⁿ up to right-inverse equivalence.

    In B^r × ℤ^s a right-invertible element has exactly one right inverse, so
    the classes are the elements themselves; the count is |Sⁿ ∩ R(M)|.
    """
    S = set(S)
    for x in S:
        if len(x.b_parts) != r or len(x.z_parts) != s:
            raise LowerBoundError("element shape does not match r and s")
    layer = {BZElement.one(r, s)}
    for _ in range(n):
        layer = {x * y for x in layer for y in S}
        if len(layer) > cap:
            raise LowerBoundError(f"more than {cap} products; raise the cap or shrink the input")
    return sum(1 for x in layer if x.right_invertible)


def products(S: Iterable[BZElement], n: int, r: int, s: int) -> set:
    layer = {BZElement.one(r, s)}
    for _ in range(n):
        layer = {x * y for x in layer for y in set(S)}
    return layer


def quotient_count(elements: Iterable[BZElement], probe: int) -> int:
    """Classes of right-invertible elements under equality of right-inverse sets.

    Right inverses are searched among all elements whose components are
    bounded by ``probe``; this is the definition, evaluated on a finite window.
    """
    elements = [x for x in elements if x.right_invertible]
    if not elements:
        return 0
    r, s = len(elements[0].b_parts), len(elements[0].z_parts)
    b_range = [(k, l) for k in range(probe + 1) for l in range(probe + 1)]
    z_range = range(-probe, probe + 1)
    candidates = [BZElement(b, z) for b in product(b_range, repeat=r) for z in product(z_range, repeat=s)]
    classes = set()
    for x in elements:
        classes.add(frozenset(y for y in candidates if (x * y).is_unit))
    return len(classes)


def word_to_bz(g: StorageGraph, w: Sequence[GenSymbol]) -> BZElement:
    """Evaluate a word over a graph whose vertices are pairwise adjacent.

    Unlooped vertices become B factors, looped ones ℤ factors, both in
    declaration order.
    """
    for i, u in enumerate(g.vertices):
        for v in g.vertices[i + 1:]:
            if not g.adjacent(u, v):
                raise LowerBoundError("the graph is not complete, so MΓ is not B^r × ℤ^s")
    bverts = [v for v in g.vertices if not g.is_looped(v)]
    zverts = [v for v in g.vertices if g.is_looped(v)]
    r, s = len(bverts), len(zverts)
    x = BZElement.one(r, s)
    for sym in w:
        if sym.vertex in zverts:
            z = [0] * s
            z[zverts.index(sym.vertex)] = 1 if sym.positive else -1
            y = BZElement(((0, 0),) * r, z)
        else:
            b = [(0, 0)] * r
            b[bverts.index(sym.vertex)] = (0, 1) if sym.positive else (1, 0)
            y = BZElement(b, (0,) * s)
        x = x * y
    return x


def machine_parameters(A) -> tuple:
    """(k, m, r, s) of a λ-free automaton over B^r × ℤ^s: states and max edge norm."""
    g = A.graph
    r = len([v for v in g.vertices if not g.is_looped(v)])
    s = len(g.vertices) - r
    m = max((word_to_bz(g, e.monoid).norm for e in A.edges), default=0)
    return len(A.states), m, r, s


# -- the witness ------------------------------------------------------------

def impossibility_witness(k: int, m: int, r: int, s: int) -> int:
    """Least n with 2ⁿ > k·(m·n+1)^r·(2·m·n+1)^s."""
    if r < 2:
        raise LowerBoundError("the separation needs r >= 2 partially blind counters")
    if k < 1 or m < 0 or s < 0:
        raise LowerBoundError("need k >= 1 and m, s >= 0")
    n = 0
    while 2 ** n <= k * f_upper_bound(r, s, m, n):
        n += 1
    return n


@dataclass
class FoolingReport:
    n: int
    fooling_size: int
    k: int
    m: int
    r: int
    s: int
    bound_value: int
    verdict: bool
    fooling_set: list | None = field(default=None, repr=False)
    fooling_valid: bool | None = None

    def rows(self) -> list:
        rows = [
            ("n", self.n),
            ("fooling_size", self.fooling_size),
            ("k", self.k),
            ("m", self.m),
            ("r", self.r),
            ("s", self.s),
            ("bound_value", self.bound_value),
            ("verdict", "IMPOSSIBLE" if self.verdict else "NO-SEPARATION"),
        ]
        if self.fooling_valid is not None:
            rows.append(("fooling_set_checked", "valid" if self.fooling_valid else "INVALID"))
        return rows

    def explanation(self) -> str:
        return (f"2^{self.n} = {self.fooling_size} > {self.k}*({self.m}*{self.n}+1)^{self.r}"
                f"*(2*{self.m}*{self.n}+1)^{self.s} = {self.bound_value}: no lambda-free automaton "
                f"with {self.k} states and edge norms <= {self.m} over B^{self.r} x Z^{self.s} accepts L1")


def lower_bound_report(k: int, m: int, r: int, s: int) -> FoolingReport:
    n = impossibility_witness(k, m, r, s)
    bound = k * f_upper_bound(r, s, m, n)
    size = 2 ** n
    report = FoolingReport(n, size, k, m, r, s, bound, size > bound)
    if n <= 12:
        pairs = fooling_set_l1(n)
        report.fooling_set = pairs
        report.fooling_valid = fooling_set_valid(pairs)
    return report
