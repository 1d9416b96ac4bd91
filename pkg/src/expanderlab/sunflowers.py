"""Greedy sunflower extraction from witness maps.

A (mu, zeta, t)-sunflower is a family of zeta-subsets sharing a core F
(|F| <= t) such that every non-core element appears in at most a
(zeta/N)^(1-mu) fraction of the family.  Extraction restricts the most
popular witness class on any element whose frequency reaches that threshold.
All frequency/threshold comparisons are exact rational arithmetic: with
counts c over family size s and exponent 1-mu = a/b, the test
c/s >= (zeta/N)^(a/b) is decided as (c/s)^b >= (zeta/N)^a over Fractions.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .randomness import make_rng


@dataclass(frozen=True)
class Sunflower:
    sets: tuple          # frozensets of vertices, each of size zeta
    core: frozenset
    mu: Fraction
    zeta: int


@dataclass(frozen=True)
class SunflowerCheck:
    ok: bool
    missing_core: tuple = ()     # sets that do not contain the core
    heavy: tuple = ()            # (vertex, frequency) pairs over the threshold

    def first_violation(self):
        if self.missing_core:
            return ("core", self.missing_core[0])
        if self.heavy:
            return ("frequency", self.heavy[0])
        return None


def _as_fraction(mu) -> Fraction:
    mu = Fraction(mu)
    if not 0 < mu < 1:
        raise ValueError(f"mu must be in (0, 1), got {mu}")
    return mu


def _meets_threshold(count: int, total: int, zeta: int, n: int, mu: Fraction) -> bool:
    """count/total >= (zeta/n)^(1-mu), decided exactly."""
    exp = 1 - mu
    lhs = Fraction(count, total) ** exp.denominator
    rhs = Fraction(zeta, n) ** exp.numerator
    return lhs >= rhs


def _within_threshold(count: int, total: int, zeta: int, n: int, mu: Fraction) -> bool:
    """count/total <= (zeta/n)^(1-mu), decided exactly."""
    exp = 1 - mu
    lhs = Fraction(count, total) ** exp.denominator
    rhs = Fraction(zeta, n) ** exp.numerator
    return lhs <= rhs


def extract_sunflower(witness_map: dict, mu, zeta: int, n: int) -> tuple[Sunflower, str]:
    """Extract a sunflower from the most popular witness class of a map
    ``zeta-subset -> witness string``.

    Popularity ties break toward the lexicographically smallest witness;
    pivot ties toward the smallest vertex.  Each pivot restricts the family
    to the sets containing the pivot and adds it to the core; the fixed point
    satisfies the sunflower conditions by construction (and is re-checked by
    :func:`verify_sunflower` in the tests, not here).
    """
    if not witness_map:
        raise ValueError("witness map is empty")
    mu = _as_fraction(mu)
    family = []
    for s, wit in witness_map.items():
        fs = frozenset(int(v) for v in s)
        if len(fs) != zeta:
            raise ValueError(f"set {sorted(fs)} does not have zeta={zeta} elements")
        if not all(0 <= v < n for v in fs):
            raise ValueError("set elements out of range")
        family.append((fs, wit))

    counts = Counter(wit for _, wit in family)
    top = max(counts.items(), key=lambda item: (item[1], _neg_lex(item[0])))
    star = top[0]
    current = sorted((fs for fs, wit in family if wit == star),
                     key=lambda fs: sorted(fs))
    core: set[int] = set()
    while True:
        total = len(current)
        freq = Counter()
        for fs in current:
            freq.update(fs)
        pivot = None
        for v in sorted(freq):
            if v in core:
                continue
            if _meets_threshold(freq[v], total, zeta, n, mu):
                pivot = v
                break
        if pivot is None:
            break
        core.add(pivot)
        current = [fs for fs in current if pivot in fs]
    return Sunflower(tuple(current), frozenset(core), mu, zeta), star


def _neg_lex(s: str):
    # invert the string so that max() prefers the lexicographically smallest
    return tuple(-ord(c) for c in s)


def verify_sunflower(sf: Sunflower, n: int) -> SunflowerCheck:
    """Check both definitional conditions by exact counting."""
    missing = tuple(sorted(s) for s in sf.sets if not sf.core <= s)
    total = len(sf.sets)
    heavy = []
    if total:
        freq = Counter()
        for s in sf.sets:
            freq.update(s)
        for v in sorted(freq):
            if v in sf.core:
                continue
            if not _within_threshold(freq[v], total, sf.zeta, n, sf.mu):
                heavy.append((v, Fraction(freq[v], total)))
    return SunflowerCheck(not missing and not heavy, missing, tuple(heavy))


@dataclass(frozen=True)
class CoreSizeBound:
    strict: float        # q / (mu * log2(N / zeta))
    relaxed: float | None  # 2q / (mu * log2 ell), when ell is supplied


def core_size_bound(q: int, mu, n: int, zeta: int, ell: int | None = None) -> CoreSizeBound:
    """Upper bounds on the extracted core size for q-bit witnesses."""
    mu = _as_fraction(mu)
    if zeta >= n:
        raise ValueError("need zeta < n")
    if q < 0:
        raise ValueError("witness length must be non-negative")
    strict = q / (float(mu) * math.log2(n / zeta))
    relaxed = None
    if ell is not None:
        if ell < 2:
            raise ValueError("relaxed bound needs ell >= 2")
        relaxed = 2 * q / (float(mu) * math.log2(ell))
    return CoreSizeBound(strict, relaxed)


def ideal_family(core, zeta: int, n: int) -> tuple:
    """All zeta-supersets of a fixed core."""
    from itertools import combinations
    core = frozenset(int(v) for v in core)
    rest = [v for v in range(n) if v not in core]
    need = zeta - len(core)
    if need < 0:
        raise ValueError("core larger than zeta")
    return tuple(core | frozenset(extra) for extra in combinations(rest, need))


def full_domain(zeta: int, n: int) -> tuple:
    """All zeta-subsets of the vertex range; keep n small."""
    from itertools import combinations
    return tuple(frozenset(c) for c in combinations(range(n), zeta))


def random_witness_map(n: int, zeta: int, q: int, rng) -> dict:
    """Uniformly random q-bit witness per zeta-subset over the full domain."""
    gen = make_rng(rng)
    domain = full_domain(zeta, n)
    bits = gen.integers(0, 2, size=(len(domain), q)) if q else np.zeros((len(domain), 0), dtype=int)
    return {s: "".join(str(b) for b in row) for s, row in zip(domain, bits)}


# -- fixture IO ----------------------------------------------------------------

def load_witness_map(path) -> dict:
    """JSON-lines fixtures: {"set": [...], "witness": "bitstring"} per line."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out[frozenset(int(v) for v in rec["set"])] = str(rec["witness"])
    if not out:
        raise ValueError("empty witness map fixture")
    return out


def save_witness_map(witness_map: dict, path) -> None:
    with open(path, "w") as fh:
        for s in sorted(witness_map, key=sorted):
            fh.write(json.dumps({"set": sorted(s), "witness": witness_map[s]}) + "\n")
