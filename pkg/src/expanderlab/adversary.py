"""Adversary-relation construction and query lower-bound formulas at tiny scale.

Oracle strings here are permutation pairs: the queryable part is the
concatenation of the forward and inverse lookup tables (2N positions), plus a
non-queryable tag recording which relation slice the string belongs to (the
standard device for keeping slices disjoint without letting the algorithm
read the label).  The relation links permutations sending a family set onto
the window [k] to permutations doing the same for a reference family, via a
canonical pair construction that agrees off the set difference and swaps
across it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations as iter_permutations

_ENUMERATION_LIMIT = 8


@dataclass(frozen=True)
class PermutationPair:
    """One oracle string: forward table, inverse table, non-queryable tag."""

    forward: tuple
    inverse: tuple
    tag: int = 0

    def table(self) -> tuple:
        """The 2N queryable positions."""
        return self.forward + self.inverse


@dataclass(frozen=True)
class PermRelation:
    x_side: tuple        # PermutationPair drawn from the test family
    y_side: tuple        # PermutationPair drawn from the reference family
    pairs: tuple         # (xi, yi) index pairs into the two sides
    window: int          # k: the sets are mapped onto 0..k-1
    n: int


@dataclass(frozen=True)
class RelationStats:
    """Degree extrema and the worst differing-index product feeding the
    lower-bound formula.

    ``l_max`` maxes over all 2N queryable positions.  ``l_max_forward``
    restricts to the forward table, the positions where differing-neighbor
    counts are containment frequencies and the sunflower frequency cap
    applies; on inverse-table positions the counts are complement counts
    (sets NOT containing a point) and can approach the family sizes, so the
    frequency cap has no purchase there.
    """

    m_lo: int
    m_hi: int
    mp_lo: int
    mp_hi: int
    l_max: int
    l_max_forward: int
    n_x: int
    n_y: int
    n_pairs: int
    degenerate: bool = False


def _canonical_chi(s_x: frozenset, s_y: frozenset, k: int, n: int) -> tuple:
    """Deterministic permutation sending s_x onto 0..k-1: the intersection
    with s_y first in sorted order, then s_x's own part, then everything else
    in sorted order onto the remaining targets."""
    shared = sorted(s_x & s_y)
    own = sorted(s_x - s_y)
    rest = sorted(set(range(n)) - s_x)
    chi = [0] * n
    target = 0
    for v in shared + own:
        chi[v] = target
        target += 1
    for v in rest:
        chi[v] = target
        target += 1
    return tuple(chi)


def _forced_psi(chi: tuple, s_x: frozenset, s_y: frozenset) -> tuple:
    """The unique companion agreeing with chi off the symmetric difference and
    swapping images across it (i-th smallest of each side paired)."""
    psi = list(chi)
    a = sorted(s_x - s_y)
    b = sorted(s_y - s_x)
    for va, vb in zip(a, b):
        psi[va], psi[vb] = chi[vb], chi[va]
    return tuple(psi)


def _invert(perm: tuple) -> tuple:
    inv = [0] * len(perm)
    for i, v in enumerate(perm):
        inv[v] = i
    return tuple(inv)


def _compose(outer: tuple, inner: tuple) -> tuple:
    """(outer o inner)(v) = outer[inner[v]]."""
    return tuple(outer[v] for v in inner)


def build_permutation_relation(sunflower_sets, ideal_sets, k: int, n: int,
                               tag: int | None = None) -> PermRelation:
    """Build the full relation between permutations mapping a sunflower set
    onto [k] and permutations mapping an ideal-family set onto [k].

    For every set pair a canonical (chi, psi) is constructed, then the
    relation is closed over every window-preserving permutation tau
    (tau([k]) = [k]):  (tau o chi, tau o psi) for all tau.  Exhaustive, so
    n <= 8.
    """
    if n > _ENUMERATION_LIMIT:
        raise ValueError(f"full enumeration refuses n > {_ENUMERATION_LIMIT}")
    if not (1 <= k <= n):
        raise ValueError("window size k must be in 1..n")
    left = [frozenset(int(v) for v in s) for s in sunflower_sets]
    right = [frozenset(int(v) for v in s) for s in ideal_sets]
    for s in left + right:
        if len(s) != k:
            raise ValueError(f"every set must have exactly k={k} elements")
        if not all(0 <= v < n for v in s):
            raise ValueError("set elements out of range")
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise ValueError("families must not repeat sets")
    the_tag = k if tag is None else tag

    # all tau with tau([k]) = [k]: independent permutations of the window
    # and of its complement
    window = list(range(k))
    outside = list(range(k, n))
    taus = []
    for pw in iter_permutations(window):
        for po in iter_permutations(outside):
            tau = list(pw) + list(po)
            taus.append(tuple(tau))

    x_index: dict[tuple, int] = {}
    y_index: dict[tuple, int] = {}
    x_side: list[PermutationPair] = []
    y_side: list[PermutationPair] = []
    pairs = set()
    for s_x in left:
        for s_y in right:
            chi = _canonical_chi(s_x, s_y, k, n)
            psi = _forced_psi(chi, s_x, s_y)
            for tau in taus:
                fx = _compose(tau, chi)
                fy = _compose(tau, psi)
                if fx not in x_index:
                    x_index[fx] = len(x_side)
                    x_side.append(PermutationPair(fx, _invert(fx), the_tag))
                if fy not in y_index:
                    y_index[fy] = len(y_side)
                    y_side.append(PermutationPair(fy, _invert(fy), the_tag))
                pairs.add((x_index[fx], y_index[fy]))
    return PermRelation(tuple(x_side), tuple(y_side), tuple(sorted(pairs)), k, n)


def differing_positions(x: PermutationPair, y: PermutationPair) -> tuple:
    """Queryable positions (0..2N-1) where the two oracle strings differ."""
    tx, ty = x.table(), y.table()
    return tuple(i for i in range(len(tx)) if tx[i] != ty[i])


def relation_stats(rel: PermRelation) -> RelationStats:
    """Brute-force degree extrema and the worst l_{x,i} * l_{y,i} product over
    related pairs and their differing queryable positions."""
    if not rel.pairs:
        return RelationStats(0, 0, 0, 0, 0, 0, len(rel.x_side), len(rel.y_side), 0, True)
    deg_x = [0] * len(rel.x_side)
    deg_y = [0] * len(rel.y_side)
    x_neighbors = [[] for _ in rel.x_side]
    y_neighbors = [[] for _ in rel.y_side]
    for xi, yi in rel.pairs:
        deg_x[xi] += 1
        deg_y[yi] += 1
        x_neighbors[xi].append(yi)
        y_neighbors[yi].append(xi)

    x_tables = [p.table() for p in rel.x_side]
    y_tables = [p.table() for p in rel.y_side]
    width = 2 * rel.n

    # l_x[xi][i] = number of related y' differing from x at position i
    l_x = [[0] * width for _ in rel.x_side]
    for xi, tx in enumerate(x_tables):
        for yi in x_neighbors[xi]:
            ty = y_tables[yi]
            for i in range(width):
                if tx[i] != ty[i]:
                    l_x[xi][i] += 1
    l_y = [[0] * width for _ in rel.y_side]
    for yi, ty in enumerate(y_tables):
        for xi in y_neighbors[yi]:
            tx = x_tables[xi]
            for i in range(width):
                if tx[i] != ty[i]:
                    l_y[yi][i] += 1

    l_max = 0
    l_max_forward = 0
    any_differs = False
    for xi, yi in rel.pairs:
        tx, ty = x_tables[xi], y_tables[yi]
        for i in range(width):
            if tx[i] != ty[i]:
                any_differs = True
                prod = l_x[xi][i] * l_y[yi][i]
                l_max = max(l_max, prod)
                if i < rel.n:
                    l_max_forward = max(l_max_forward, prod)
    return RelationStats(min(deg_x), max(deg_x), min(deg_y), max(deg_y),
                         l_max, l_max_forward,
                         len(rel.x_side), len(rel.y_side), len(rel.pairs),
                         degenerate=not any_differs)


def union_relations(relations) -> PermRelation:
    """Union of relations over disjoint oracle supports (distinct tags keep
    the strings distinct even when the queryable tables coincide)."""
    relations = list(relations)
    if not relations:
        raise ValueError("nothing to union")
    n = relations[0].n
    if any(r.n != n for r in relations):
        raise ValueError("all relations must share the ground set size")
    seen_x, seen_y = set(), set()
    for r in relations:
        xs = {(p.forward, p.tag) for p in r.x_side}
        ys = {(p.forward, p.tag) for p in r.y_side}
        if seen_x & xs or seen_y & ys:
            raise ValueError("oracle supports overlap; tags must separate slices")
        seen_x |= xs
        seen_y |= ys
    x_side, y_side, pairs = [], [], []
    for r in relations:
        x_off, y_off = len(x_side), len(y_side)
        x_side.extend(r.x_side)
        y_side.extend(r.y_side)
        pairs.extend((xi + x_off, yi + y_off) for xi, yi in r.pairs)
    return PermRelation(tuple(x_side), tuple(y_side), tuple(pairs),
                        relations[0].window, n)


@dataclass(frozen=True)
class QueryBound:
    value: float
    vacuous: bool


def query_lower_bound(stats: RelationStats, eps: float) -> QueryBound:
    """(1 - 2 sqrt(eps(1-eps))) * sqrt((m_lo - 2 eps m_hi)(mp_lo - 2 eps mp_hi) / l_max).

    Inner factors that go negative are clamped to zero and flagged vacuous
    rather than silently producing a fake positive bound.
    """
    if not 0.0 <= eps <= 0.5:
        raise ValueError("eps must be in [0, 1/2]")
    if stats.l_max <= 0:
        raise ValueError("l_max must be positive; the relation is degenerate")
    inner_x = stats.m_lo - 2.0 * eps * stats.m_hi
    inner_y = stats.mp_lo - 2.0 * eps * stats.mp_hi
    vacuous = inner_x < 0.0 or inner_y < 0.0
    inner_x = max(inner_x, 0.0)
    inner_y = max(inner_y, 0.0)
    prefactor = 1.0 - 2.0 * math.sqrt(eps * (1.0 - eps))
    return QueryBound(prefactor * math.sqrt(inner_x * inner_y / stats.l_max), vacuous)


def distinguishing_lower_bound(stats: RelationStats, delta: float) -> QueryBound:
    """Bound for (1-delta)-distinguishing the two uniform supports: the
    query formula at eps = 2*delta."""
    if not 0.0 <= delta <= 0.25:
        raise ValueError("delta must be in [0, 1/4]")
    return query_lower_bound(stats, 2.0 * delta)


def sunflower_permutation_bound(n: int, zeta: int, mu: float, delta: float) -> float:
    """Closed form for telling a sunflower family's permutations from the
    ideal family's:  (1 - 2 sqrt(2 delta (1-2 delta))) (1-4 delta) sqrt((n/zeta)^(1-mu))."""
    if not 0.0 <= delta < 0.25:
        raise ValueError("delta must be in [0, 1/4)")
    prefactor = 1.0 - 2.0 * math.sqrt(2.0 * delta * (1.0 - 2.0 * delta))
    return prefactor * (1.0 - 4.0 * delta) * math.sqrt((n / zeta) ** (1.0 - mu))


def sunflower_graph_bound(n: int, zeta: int, mu: float, delta: float) -> float:
    """Graph-oracle version: one graph query costs two permutation queries,
    so the permutation bound halves."""
    return 0.5 * sunflower_permutation_bound(n, zeta, mu, delta)
