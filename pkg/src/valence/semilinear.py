"""Multisets, semilinear sets, Parikh images and preimages of weight maps.

Vectors are plain integer tuples.  A :class:`LinearSet` is ``base + N·periods``;
a :class:`SemilinearSet` is a finite union of linear sets of one dimension.
The preimage machinery follows the usual band argument: a minimal solution
of ``φ(μ) = n`` can be ordered so that its running sums never repeat, which
bounds its size and makes bounded enumeration exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import networkx as nx

NATURALS = "naturals"
INTEGERS = "integers"


class SemilinearError(ValueError):
    """Dimension/domain mismatches and refused membership questions."""


# -- vectors -----------------------------------------------------------

def vadd(u: Sequence[int], v: Sequence[int]) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence[int], v: Sequence[int]) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(k: int, v: Sequence[int]) -> tuple:
    return tuple(k * a for a in v)


def zero(dim: int) -> tuple:
    return (0,) * dim


# -- multisets -----------------------------------------------------------

@dataclass(frozen=True)
class Multiset:
    """Element of X^⊕ over an ordered alphabet."""

    alphabet: tuple
    counts: tuple  # one natural per alphabet symbol

    def __post_init__(self):
        if len(self.alphabet) != len(self.counts):
            raise SemilinearError("alphabet and counts differ in length")
        if any(c < 0 for c in self.counts):
            raise SemilinearError("multiset counts must be natural numbers")

    @classmethod
    def from_dict(cls, alphabet: Sequence, counts: Mapping) -> "Multiset":
        unknown = set(counts) - set(alphabet)
        if unknown:
            raise SemilinearError(f"symbols outside the alphabet: {sorted(map(str, unknown))}")
        return cls(tuple(alphabet), tuple(int(counts.get(x, 0)) for x in alphabet))

    @classmethod
    def empty(cls, alphabet: Sequence) -> "Multiset":
        return cls(tuple(alphabet), zero(len(alphabet)))

    def __getitem__(self, x) -> int:
        return self.counts[self.alphabet.index(x)]

    def __len__(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict:
        return {x: c for x, c in zip(self.alphabet, self.counts) if c}

    def divides(self, other: "Multiset") -> bool:
        """ν ⊑ μ: componentwise ≤."""
        return self.alphabet == other.alphabet and all(a <= b for a, b in zip(self.counts, other.counts))

    def __add__(self, other: "Multiset") -> "Multiset":
        return Multiset(self.alphabet, vadd(self.counts, other.counts))

    def __sub__(self, other: "Multiset") -> "Multiset":
        return Multiset(self.alphabet, vsub(self.counts, other.counts))


def parikh(w: Iterable, alphabet: Sequence | None = None) -> Multiset:
    w = list(w)
    if alphabet is None:
        alphabet = sorted(set(w), key=str)
    counts = dict.fromkeys(alphabet, 0)
    for x in w:
        if x not in counts:
            raise SemilinearError(f"letter {x!r} not in the alphabet")
        counts[x] += 1
    return Multiset(tuple(alphabet), tuple(counts[x] for x in alphabet))


# -- linear and semilinear sets -------------------------------------------

@dataclass(frozen=True)
class LinearSet:
    base: tuple
    periods: tuple = ()
    domain: str = NATURALS
    # optional per-part bound on every period coefficient, recorded by
    # constructions that know one; makes integer-domain membership decidable
    coeff_bound: int | None = field(default=None, compare=False)

    def __post_init__(self):
        base = tuple(int(x) for x in self.base)
        periods = tuple(tuple(int(x) for x in p) for p in self.periods)
        if self.domain not in (NATURALS, INTEGERS):
            raise SemilinearError(f"unknown domain {self.domain!r}")
        for p in periods:
            if len(p) != len(base):
                raise SemilinearError("period dimension differs from base dimension")
            if not any(p):
                raise SemilinearError("zero period vector")
        if self.domain == NATURALS:
            if any(x < 0 for x in base) or any(x < 0 for p in periods for x in p):
                raise SemilinearError("negative component in a naturals-domain set")
        # canonical order of periods, duplicates removed
        periods = tuple(sorted(set(periods)))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "periods", periods)

    @property
    def dim(self) -> int:
        return len(self.base)

    def elements(self, max_coeff: int) -> set:
        """All members with every coefficient at most ``max_coeff``."""
        out = {self.base}
        for p in self.periods:
            out = {vadd(v, vscale(t, p)) for v in out for t in range(max_coeff + 1)}
        return out


@dataclass(frozen=True)
class SemilinearSet:
    dim: int
    parts: tuple = ()
    domain: str = NATURALS

    def __post_init__(self):
        parts = tuple(self.parts)
        for part in parts:
            if part.dim != self.dim:
                raise SemilinearError(f"part of dimension {part.dim} in a set of dimension {self.dim}")
            if part.domain != self.domain:
                raise SemilinearError("mixed domains in one semilinear set")
        object.__setattr__(self, "parts", _dedupe_parts(parts))

    def is_empty(self) -> bool:
        return not self.parts

    def elements(self, max_coeff: int) -> set:
        out = set()
        for part in self.parts:
            out |= part.elements(max_coeff)
        return out

    def __str__(self) -> str:
        return "\n".join(format_linear(p) for p in self.parts) if self.parts else "empty"


def _dedupe_parts(parts: tuple) -> tuple:
    seen = {}
    for p in parts:
        key = (p.base, p.periods)
        if key not in seen:
            seen[key] = p
    kept = list(seen.values())
    # drop a part whose base equals another's and whose periods are a subset
    result = []
    for p in kept:
        pset = set(p.periods)
        if any(q is not p and q.base == p.base and pset < set(q.periods) for q in kept):
            continue
        result.append(p)
    result.sort(key=lambda p: (p.base, p.periods))
    return tuple(result)


def format_vector(v: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def format_linear(p: LinearSet) -> str:
    periods = ";".join(format_vector(q) for q in p.periods) if p.periods else "-"
    return f"base {format_vector(p.base)} periods {periods}"


def singleton(v: Sequence[int], domain: str = NATURALS) -> SemilinearSet:
    v = tuple(v)
    return SemilinearSet(len(v), (LinearSet(v, (), domain),), domain)


def empty_set(dim: int, domain: str = NATURALS) -> SemilinearSet:
    return SemilinearSet(dim, (), domain)


def linear(base: Sequence[int], periods: Iterable[Sequence[int]] = (), domain: str = NATURALS) -> SemilinearSet:
    base = tuple(base)
    periods = [tuple(p) for p in periods if any(p)]
    return SemilinearSet(len(base), (LinearSet(base, tuple(periods), domain),), domain)


def _check_compatible(S: SemilinearSet, T: SemilinearSet) -> None:
    if S.dim != T.dim:
        raise SemilinearError(f"dimension mismatch: {S.dim} vs {T.dim}")
    if S.domain != T.domain:
        raise SemilinearError(f"domain mismatch: {S.domain} vs {T.domain}")


def _merge_bound(a: int | None, b: int | None) -> int | None:
    return None if a is None or b is None else max(a, b)


def sl_sum(S: SemilinearSet, T: SemilinearSet) -> SemilinearSet:
    _check_compatible(S, T)
    parts = []
    for p in S.parts:
        for q in T.parts:
            parts.append(LinearSet(vadd(p.base, q.base), p.periods + q.periods, S.domain,
                                   _merge_bound(p.coeff_bound, q.coeff_bound)))
    return SemilinearSet(S.dim, tuple(parts), S.domain)


def sl_union(S: SemilinearSet, T: SemilinearSet) -> SemilinearSet:
    _check_compatible(S, T)
    return SemilinearSet(S.dim, S.parts + T.parts, S.domain)


def sl_union_all(sets: Iterable[SemilinearSet], dim: int, domain: str = NATURALS) -> SemilinearSet:
    parts: list = []
    for S in sets:
        if S.dim != dim or S.domain != domain:
            raise SemilinearError("dimension or domain mismatch in union")
        parts.extend(S.parts)
    return SemilinearSet(dim, tuple(parts), domain)


def as_integers(S: SemilinearSet) -> SemilinearSet:
    """The same set viewed inside ℤ^k; natural sets keep a coefficient argument."""
    if S.domain == INTEGERS:
        return S
    return SemilinearSet(S.dim, tuple(LinearSet(p.base, p.periods, INTEGERS, p.coeff_bound) for p in S.parts),
                         INTEGERS)


def _coefficient_bounds(part: LinearSet, v: Sequence[int]) -> list | None:
    """Per-period coefficient bounds, or None when no bound is derivable."""
    diff = vsub(v, part.base)
    bounds = []
    for p in part.periods:
        best = None
        for c, pc in enumerate(p):
            if pc == 0:
                continue
            signs = {(q[c] > 0) - (q[c] < 0) for q in part.periods if q[c] != 0}
            if len(signs) == 1:
                if (diff[c] > 0) - (diff[c] < 0) not in (0, next(iter(signs))):
                    return [-1]  # the residual points away from every period
                b = abs(diff[c]) // abs(pc)
                best = b if best is None else min(best, b)
        if best is None:
            if part.coeff_bound is None:
                return None
            best = part.coeff_bound
        bounds.append(best)
    return bounds


def _member_part(part: LinearSet, v: tuple) -> bool:
    diff = vsub(v, part.base)
    if not part.periods:
        return not any(diff)
    bounds = _coefficient_bounds(part, v)
    if bounds is None:
        raise SemilinearError("membership refused: no coefficient bound is known for this integer-domain set")
    if bounds == [-1]:
        return False
    periods = part.periods
    k = len(periods)
    dim = len(diff)
    natural = part.domain == NATURALS
    # the residual may not overshoot in coordinates where all later periods are nonnegative
    later_nonneg = [[all(periods[j][c] >= 0 for j in range(i, k)) for c in range(dim)] for i in range(k + 1)]
    later_nonpos = [[all(periods[j][c] <= 0 for j in range(i, k)) for c in range(dim)] for i in range(k + 1)]

    def feasible(i: int, residual: tuple) -> bool:
        for c in range(dim):
            if later_nonneg[i][c] and residual[c] < 0:
                return False
            if later_nonpos[i][c] and residual[c] > 0:
                return False
        return True

    def dfs(i: int, residual: tuple) -> bool:
        if i == k:
            return not any(residual)
        if not feasible(i, residual):
            return False
        p = periods[i]
        r = residual
        for _ in range(bounds[i] + 1):
            if dfs(i + 1, r):
                return True
            r = vsub(r, p)
            if natural and any(x < 0 for x in r):
                break
        return False

    return dfs(0, diff)


def sl_member(S: SemilinearSet, v: Sequence[int]) -> bool:
    v = tuple(v)
    if len(v) != S.dim:
        raise SemilinearError(f"vector of dimension {len(v)} for a set of dimension {S.dim}")
    if S.domain == NATURALS and any(x < 0 for x in v):
        return False
    return any(_member_part(p, v) for p in S.parts)


# -- linear maps on semilinear sets ------------------------------------------

def sl_image(S: SemilinearSet, images: Sequence[Sequence[int]], dim: int,
             domain: str = INTEGERS) -> SemilinearSet:
    """Image under the linear map sending unit vector i to ``images[i]``."""
    if len(images) != S.dim:
        raise SemilinearError("one image vector per coordinate is required")

    def apply(v):
        out = [0] * dim
        for x, img in zip(v, images):
            if x:
                for c in range(dim):
                    out[c] += x * img[c]
        return tuple(out)

    parts = []
    for p in S.parts:
        periods = tuple(q for q in (apply(q) for q in p.periods) if any(q))
        parts.append(LinearSet(apply(p.base), periods, domain, p.coeff_bound))
    return SemilinearSet(dim, tuple(parts), domain)


def sl_project(S: SemilinearSet, coords: Sequence[int]) -> SemilinearSet:
    images = [[1 if c == k else 0 for k in coords] for c in range(S.dim)]
    return sl_image(S, images, len(coords), S.domain)


def sl_slice(S: SemilinearSet, coord: int, value: int = 0) -> SemilinearSet:
    """{v with v[coord] = value}, returned without that coordinate."""
    rest = [c for c in range(S.dim) if c != coord]
    parts = []
    for p in S.parts:
        weights = WeightMap(tuple(range(len(p.periods))), tuple(q[coord] for q in p.periods))
        coeffs = preimage_semilinear(weights, value - p.base[coord])
        if coeffs.is_empty():
            continue
        images = [tuple(q[c] for c in rest) for q in p.periods]
        base = tuple(p.base[c] for c in rest)
        img = sl_image(coeffs, images, len(rest), S.domain) if p.periods else singleton(base, S.domain)
        for q in img.parts:
            parts.append(LinearSet(vadd(base, q.base) if p.periods else q.base, q.periods, S.domain,
                                   p.coeff_bound))
    return SemilinearSet(len(rest), tuple(parts), S.domain)


def prune_periods(S: SemilinearSet) -> SemilinearSet:
    """Drop periods that are sums of at most two other periods of the same part."""
    parts = []
    for p in S.parts:
        per = list(p.periods)
        keep = []
        for i, q in enumerate(per):
            others = [r for j, r in enumerate(per) if j != i and r is not None]
            redundant = q in others or any(vadd(a, b) == q for a in others for b in others)
            if redundant:
                per[i] = None
                continue
            keep.append(q)
        per = [q for q in per if q is not None]
        parts.append(LinearSet(p.base, tuple(per), p.domain, p.coeff_bound))
    return SemilinearSet(S.dim, tuple(parts), S.domain)


# -- weight maps and preimages ---------------------------------------------

@dataclass(frozen=True)
class WeightMap:
    """A morphism φ: X^⊕ → ℤ given by one integer weight per symbol."""

    alphabet: tuple
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.alphabet) != len(self.weights):
            raise SemilinearError("one weight per symbol is required")

    @classmethod
    def from_dict(cls, weights: Mapping) -> "WeightMap":
        alphabet = tuple(weights)
        return cls(alphabet, tuple(weights[x] for x in alphabet))

    @property
    def m(self) -> int:
        return max((abs(w) for w in self.weights), default=0)

    def __call__(self, mu: Multiset | Sequence[int]) -> int:
        counts = mu.counts if isinstance(mu, Multiset) else tuple(mu)
        return sum(w * c for w, c in zip(self.weights, counts))


def _solutions_up_to(weights: Sequence[int], target: int, size: int) -> list:
    """All μ with φ(μ) = target and |μ| ≤ size (ignoring zero-weight symbols)."""
    idx = [i for i, w in enumerate(weights) if w != 0]
    k = len(weights)
    out = []
    pos_max = max((weights[i] for i in idx if weights[i] > 0), default=0)
    neg_max = max((-weights[i] for i in idx if weights[i] < 0), default=0)

    def rec(j: int, acc: int, left: int, cur: list):
        if j == len(idx):
            if acc == target:
                v = [0] * k
                for i, c in zip(idx, cur):
                    v[i] = c
                out.append(tuple(v))
            return
        # reachable range with the remaining budget
        if acc + left * pos_max < target or acc - left * neg_max > target:
            return
        w = weights[idx[j]]
        for c in range(left + 1):
            cur.append(c)
            rec(j + 1, acc + c * w, left - c, cur)
            cur.pop()

    rec(0, 0, size, [])
    return out


def _minimal(vectors: list, nonzero: bool) -> list:
    vectors = sorted(set(vectors), key=lambda v: (sum(v), v))
    kept = []
    for v in vectors:
        if nonzero and not any(v):
            continue
        if any(all(a <= b for a, b in zip(u, v)) for u in kept):
            continue
        kept.append(v)
    return kept


def preimage_semilinear(phi: WeightMap, n: int) -> SemilinearSet:
    """{μ ∈ ℕ^X : φ(μ) = n} as minimal solutions plus the minimal kernel elements."""
    k = len(phi.weights)
    m = phi.m
    zero_syms = [i for i, w in enumerate(phi.weights) if w == 0]
    unit = [tuple(1 if j == i else 0 for j in range(k)) for i in zero_syms]
    # running sums of a minimal solution stay in a band of width |n| + 2m and never repeat
    kernel = _minimal(_solutions_up_to(phi.weights, 0, 2 * m), nonzero=True)
    bases = _minimal(_solutions_up_to(phi.weights, n, abs(n) + 2 * m + 1), nonzero=False)
    periods = tuple(kernel) + tuple(unit)
    parts = tuple(LinearSet(b, periods, NATURALS) for b in bases)
    return SemilinearSet(k, parts, NATURALS)


def small_preimage(phi: WeightMap, mu: Multiset) -> Multiset:
    """ν ⊑ μ with φ(ν) = φ(μ) and |ν| ≤ (m+2)·|φ(μ)|.

    Phase one adds symbols whose weight has the sign of the target until the
    running value is within m of it; phase two walks inside the band around the
    target.  Segments between repeated running values sum to zero and are cut,
    so all running values are distinct, which gives the size bound.
    """
    if tuple(mu.alphabet) != tuple(phi.alphabet):
        raise SemilinearError("multiset and weight map use different alphabets")
    target = phi(mu)
    if target == 0:
        return Multiset.empty(mu.alphabet)
    m = phi.m
    sign = 1 if target > 0 else -1
    left = list(mu.counts)
    w = phi.weights
    seq: list = []
    value = 0

    def take(wanted_sign: int) -> int:
        for i, c in enumerate(left):
            if c and (w[i] > 0 if wanted_sign > 0 else w[i] < 0):
                left[i] -= 1
                return i
        raise AssertionError("no symbol of the required sign remains")

    # phase one
    while sign * value < sign * target - m:
        i = take(sign)
        seq.append(i)
        value += w[i]
    # phase two
    while value != target:
        i = take(1 if value < target else -1)
        seq.append(i)
        value += w[i]
    # cut segments between equal running values
    changed = True
    while changed:
        changed = False
        seen = {0: 0}
        running = 0
        for pos, i in enumerate(seq, start=1):
            running += w[i]
            if running in seen:
                del seq[seen[running]:pos]
                changed = True
                break
            seen[running] = pos
    counts = [0] * len(w)
    for i in seq:
        counts[i] += 1
    return Multiset(mu.alphabet, tuple(counts))


# -- Parikh images of finite automata ---------------------------------------

class ParikhLimit(RuntimeError):
    """The path/cycle decomposition grew past its enumeration cap."""


def parikh_image(states: Iterable, initial, finals: Iterable, transitions: Iterable,
                 dim: int, domain: str = NATURALS, cap: int = 200000) -> SemilinearSet:
    """Parikh image of a vector-labelled automaton.

    ``transitions`` are ``(src, vector, dst)``; a run's value is the sum of its
    vectors.  The image is the union, over simple accepting paths P and sets
    K of simple cycles such that P ∪ K is connected, of
    ``v(P) + Σ_{c∈K} v(c) + N·{v(c) : c ∈ K}``.
    """
    finals = set(finals)
    trans = [(s, tuple(v), t) for s, v, t in transitions]
    for _, v, _ in trans:
        if len(v) != dim:
            raise SemilinearError("transition vector of the wrong dimension")
    G = nx.MultiDiGraph()
    G.add_nodes_from(states)
    G.add_node(initial)
    for s, v, t in trans:
        G.add_edge(s, t, vec=v)
    fwd = nx.descendants(G, initial) | {initial}
    useful = {q for q in fwd if q in finals or (nx.descendants(G, q) & finals)}
    if initial not in useful:
        return empty_set(dim, domain)
    H = G.subgraph(useful)
    # parallel edges: the set of vectors between each ordered pair
    vecs: dict = {}
    for s, t, data in H.edges(data=True):
        vecs.setdefault((s, t), set()).add(data["vec"])
    simple = nx.DiGraph()
    simple.add_nodes_from(useful)
    simple.add_edges_from(vecs)

    def expand(nodes: list, closed: bool) -> set:
        steps = list(zip(nodes, nodes[1:] + ([nodes[0]] if closed else [])))
        acc = {zero(dim)}
        for st in steps:
            acc = {vadd(a, v) for a in acc for v in vecs[st]}
        return acc

    cycles = []  # (frozenset of nodes, vector)
    seen_cycles = set()
    for cyc in nx.simple_cycles(simple):
        for v in expand(list(cyc), closed=True):
            key = (frozenset(cyc), v)
            if key not in seen_cycles:
                seen_cycles.add(key)
                cycles.append(key)
    paths = []
    for f in sorted(finals & useful, key=str):
        if f == initial:
            paths.append((frozenset([initial]), zero(dim)))
            continue
        for nodes in nx.all_simple_paths(simple, initial, f):
            for v in expand(list(nodes), closed=False):
                paths.append((frozenset(nodes), v))
    parts = set()
    work = 0
    for pnodes, pvec in paths:
        # enumerate connected cycle sets by growing from the path
        stack = [(pnodes, frozenset())]
        visited = set()
        while stack:
            nodes, chosen = stack.pop()
            if chosen in visited:
                continue
            visited.add(chosen)
            work += 1
            if work > cap:
                raise ParikhLimit(f"more than {cap} path/cycle combinations")
            base = pvec
            periods = []
            for ci in chosen:
                base = vadd(base, cycles[ci][1])
                if any(cycles[ci][1]):
                    periods.append(cycles[ci][1])
            parts.add((base, tuple(sorted(set(periods)))))
            for ci, (cnodes, _) in enumerate(cycles):
                if ci not in chosen and cnodes & nodes:
                    stack.append((nodes | cnodes, chosen | {ci}))
    lin = tuple(LinearSet(b, p, domain) for b, p in sorted(parts))
    return SemilinearSet(dim, lin, domain)


def parikh_of_nfa(nfa) -> SemilinearSet:
    """Parikh image of an automaton whose edges read words over ``input_alphabet``.

    Accepts any object with ``states``, ``initial``, ``finals``, ``edges`` and
    ``input_alphabet``; an edge is ``(src, input, ..., dst)`` with ``input`` a
    string (possibly empty).  Monoid labels, if present, must be empty.
    """
    alphabet = list(nfa.input_alphabet)
    index = {x: i for i, x in enumerate(alphabet)}
    trans = []
    for e in nfa.edges:
        src, word, dst = e[0], e[1], e[-1]
        if len(e) > 3 and e[2]:
            raise SemilinearError("parikh_of_nfa needs a plain finite automaton (empty monoid labels)")
        v = [0] * len(alphabet)
        for x in word:
            v[index[x]] += 1
        trans.append((src, tuple(v), dst))
    return parikh_image(nfa.states, nfa.initial, nfa.finals, trans, len(alphabet))


def box_equal(S: SemilinearSet, T: SemilinearSet, box: int) -> bool:
    """Compare membership on every natural vector with components ≤ box."""
    from itertools import product

    for v in product(range(box + 1), repeat=S.dim):
        if sl_member(S, v) != sl_member(T, v):
            return False
    return True


def multisets_up_to(k: int, size: int):
    """All vectors in ℕ^k whose components sum to at most ``size``."""
    for total in range(size + 1):
        for combo in combinations_with_replacement(range(k), total):
            v = [0] * k
            for i in combo:
                v[i] += 1
            yield tuple(v)
