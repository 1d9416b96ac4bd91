"""Witness-free core sampling by lazy random walk, and the distributional
closeness checks that justify it.

A pseudo-core is gathered by starting at a uniform vertex, running a lazy
walk (stay with probability 1/2, else move along a uniform color), retaining
the position every ``stride`` steps, and keeping the first ``core_size``
distinct retained vertices; too few distinct vertices is an abort, not an
error.  Only the move steps query the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graphs import ColoredGraph, OracleContext, components
from .randomness import make_rng
from .sampling import DistributionParams, sample_graph, with_pinned


@dataclass(frozen=True)
class WalkParams:
    """core_size: target number of distinct vertices; stride: lazy steps
    between retained samples; retained: number of retained samples."""

    core_size: int
    stride: int
    retained: int

    def __post_init__(self):
        if self.core_size < 1 or self.stride < 1 or self.retained < self.core_size:
            raise ValueError("need core_size >= 1, stride >= 1, retained >= core_size")


def walk_params_for(core_size: int, n: int, alpha: float, c: float = 2.0) -> WalkParams:
    """Schedule retained = 100 * core_size and stride = ceil(2 c ln N / alpha),
    enough lazy steps for the walk to mix to 1/N^c accuracy at gap alpha."""
    stride = max(1, math.ceil(2.0 * c * math.log(n) / alpha))
    return WalkParams(core_size=core_size, stride=stride, retained=100 * core_size)


@dataclass(frozen=True)
class WalkCoreSample:
    """core: first ``core_size`` distinct retained vertices in retention
    order, or None on abort; retained: the full retained sequence."""

    core: tuple | None
    aborted: bool
    start: int
    retained: tuple
    queries: int


def sample_walk_core(g: ColoredGraph, params: WalkParams, rng,
                     ctx: OracleContext | None = None,
                     start: int | None = None) -> WalkCoreSample:
    """Run the lazy-walk core sampler on ``g``.

    The start vertex is uniform on the whole vertex set unless given.  The
    first retained sample is the start itself; each later one follows
    ``stride`` lazy steps.  Move steps are charged on ``ctx``; lazy stays are
    free.
    """
    gen = make_rng(rng)
    own_ctx = ctx if ctx is not None else OracleContext(g)
    v = int(gen.integers(g.n)) if start is None else int(start)
    before = own_ctx.queries
    retained = [v]
    for _ in range(params.retained - 1):
        for _ in range(params.stride):
            if gen.integers(2):
                v = own_ctx.neighbor(v, int(gen.integers(g.degree)))
        retained.append(v)
    core: list[int] = []
    for u in retained:
        if u not in core:
            core.append(u)
            if len(core) == params.core_size:
                break
    aborted = len(core) < params.core_size
    return WalkCoreSample(None if aborted else tuple(core), aborted,
                          retained[0], tuple(retained), own_ctx.queries - before)


def walk_abort_envelope(retained: int, component_size: int, alpha: float,
                        stride: int) -> float:
    """Upper envelope on the abort probability for a walk confined to an
    expanding component: 10 r K delta + exp(-r/16) with delta = (1-alpha/2)^stride.
    May exceed 1 (vacuous) when the mixing term dominates."""
    delta = (1.0 - alpha / 2.0) ** stride
    return 10.0 * retained * component_size * delta + math.exp(-retained / 16.0)


@dataclass(frozen=True)
class WalkUniformityReport:
    """Feature-level deviation of walk-sampled cores from iid-uniform cores."""

    max_inclusion_deviation: float
    max_pair_deviation: float
    envelope: float
    vacuous: bool
    abort_rate: float
    inclusion_band: tuple
    pair_band: tuple
    n_trials: int
    passed: bool


def walk_uniformity_report(g: ColoredGraph, component, params: WalkParams,
                           n_trials: int, rng, alpha: float) -> WalkUniformityReport:
    """Compare per-vertex inclusion and pairwise co-inclusion frequencies of
    walk-sampled cores against their exact iid-uniform values on one
    connected component.

    Under iid sampling the first-distinct core is exactly uniform over
    core_size-subsets, so inclusion is m/K and co-inclusion m(m-1)/(K(K-1)).
    The comparison envelope is the per-sequence closeness bound summed over
    the K^retained sequences: r K delta + (r K delta)^2 / (1 - r K delta),
    delta = (1-alpha/2)^stride; r K delta >= 1 makes it vacuous and is
    reported as such.  The pass verdict uses exact two-sided binomial bands
    around [p - envelope, p + envelope], Bonferroni-corrected over the
    number of features so the max statistic is judged at the confidence of
    a single 3-sigma test (pair counts are Poisson-thin, where normal
    sigmas mislead).
    """
    from scipy.stats import binom, norm

    gen = make_rng(rng)
    comp = np.asarray(sorted(int(v) for v in component), dtype=np.int64)
    k_size = comp.size
    m = params.core_size
    index = {int(v): i for i, v in enumerate(comp)}
    hits = np.zeros((n_trials, k_size), dtype=np.int64)
    aborts = 0
    for trial in range(n_trials):
        start = int(comp[gen.integers(k_size)])
        out = sample_walk_core(g, params, gen, start=start)
        if out.aborted:
            aborts += 1
            continue
        for v in out.core:
            hits[trial, index[v]] = 1
    kept = n_trials - aborts
    if kept == 0:
        raise RuntimeError("every walk trial aborted; nothing to compare")
    inc_counts = hits.sum(axis=0)
    expected_inc = m / k_size
    co_counts = hits.T @ hits
    expected_pair = m * (m - 1) / (k_size * (k_size - 1)) if m > 1 else 0.0
    iu = np.triu_indices(k_size, k=1)
    pair_counts = co_counts[iu]
    max_inc_dev = float(np.abs(inc_counts / kept - expected_inc).max())
    max_pair_dev = float(np.abs(pair_counts / kept - expected_pair).max()) if m > 1 else 0.0

    delta = (1.0 - alpha / 2.0) ** params.stride
    rkd = params.retained * k_size * delta
    vacuous = rkd >= 1.0
    envelope = float("inf") if vacuous else rkd + rkd * rkd / (1.0 - rkd)

    def band(p, n_features):
        tail = norm.sf(3.0) / (2 * n_features)
        hi = int(binom.isf(tail, kept, min(1.0, p + envelope)))
        lo = int(binom.ppf(tail, kept, max(0.0, p - envelope)))
        return lo, hi

    if vacuous:
        inc_band = pair_band = (0, kept)
        passed = False
    else:
        inc_band = band(expected_inc, k_size)
        inc_ok = bool((inc_counts >= inc_band[0]).all()
                      and (inc_counts <= inc_band[1]).all())
        if m > 1:
            pair_band = band(expected_pair, iu[0].size)
            pair_ok = bool((pair_counts >= pair_band[0]).all()
                           and (pair_counts <= pair_band[1]).all())
        else:
            pair_band = (0, kept)
            pair_ok = True
        passed = inc_ok and pair_ok
    return WalkUniformityReport(max_inc_dev, max_pair_dev, envelope, vacuous,
                                aborts / n_trials, inc_band, pair_band,
                                n_trials, passed)


def batch_abort_rate(g: ColoredGraph, params: WalkParams, n_trials: int, rng,
                     ctx: OracleContext | None = None,
                     starts: np.ndarray | None = None) -> float:
    """Abort frequency of the core sampler over many trials, vectorized.

    All trials advance in lockstep (one coin array and one color array per
    step), which preserves the per-trial walk law; a trial aborts when its
    retained samples hold fewer than ``core_size`` distinct vertices.  Move
    steps are charged on ``ctx``.
    """
    gen = make_rng(rng)
    if starts is None:
        pos = gen.integers(g.n, size=n_trials)
    else:
        pos = np.asarray(starts, dtype=np.int64).copy()
        if pos.shape != (n_trials,):
            raise ValueError("starts must have one entry per trial")
    seen = np.zeros((n_trials, g.n), dtype=bool)
    rows = np.arange(n_trials)
    seen[rows, pos] = True
    moves = 0
    for _ in range(params.retained - 1):
        for _ in range(params.stride):
            coins = gen.integers(2, size=n_trials).astype(bool)
            colors = gen.integers(g.degree, size=n_trials)
            moved = g.adj[pos, colors]
            pos = np.where(coins, moved, pos)
            moves += int(coins.sum())
        seen[rows, pos] = True
    if ctx is not None:
        ctx.charge(moves)
    distinct = seen.sum(axis=1)
    return float((distinct < params.core_size).mean())


# -- pinned-core order comparison ----------------------------------------------

@dataclass(frozen=True)
class OrderComparisonReport:
    """Feature-projected closeness of core-then-graph vs graph-then-core."""

    feature_tvd: dict
    block0_mean_graph_first: float
    block0_mean_core_first: float
    n_samples: int


def compare_sampling_orders(params: DistributionParams, core_size: int,
                            n_samples: int, rng,
                            n_bootstrap: int = 200) -> OrderComparisonReport:
    """Draw pairs (graph, core) both ways and compare projected features.

    Graph-first: sample an unpinned non-abort graph, pick a uniform vertex,
    take the core uniformly inside its component.  Core-first: pick the core
    uniformly among all vertex subsets, then sample a non-abort graph pinned
    to it.  Full-domain statistical distance over (graph, core) pairs is
    infeasible, so closeness is certified on the marginals the two orders
    actually shift: the component-size multiset, the block pattern of the
    core, and the size of block 0's preimage.  Each feature gets an empirical
    total-variation distance with a bootstrap interval.

    Both orders condition on non-abort: an aborted draw leaves only singleton
    components, where a multi-vertex core is undefined.
    """
    if params.pinned:
        raise ValueError("order comparison starts from the unpinned distribution")
    gen = make_rng(rng)
    feats_g_first, feats_c_first = [], []
    block0_g, block0_c = [], []
    for _ in range(n_samples):
        out = _nonabort(params, gen)
        part = components(out.graph)
        while True:
            v = int(gen.integers(params.n))
            members = part.members(int(part.labels[v]))
            if members.size >= core_size:
                break
        core = gen.choice(members, size=core_size, replace=False)
        feats_g_first.append(_features(out, core))
        block0_g.append(int((out.k_map == 0).sum()))
    for _ in range(n_samples):
        core = gen.choice(params.n, size=core_size, replace=False)
        out = _nonabort(with_pinned(params, core), gen)
        feats_c_first.append(_features(out, core))
        block0_c.append(int((out.k_map == 0).sum()))

    names = ("component_sizes", "core_block_pattern", "block0_size")
    tvd = {}
    boot = np.random.default_rng(gen.integers(2 ** 63))
    for i, name in enumerate(names):
        a = [f[i] for f in feats_g_first]
        b = [f[i] for f in feats_c_first]
        point = _empirical_tvd(a, b)
        draws = []
        for _ in range(n_bootstrap):
            ra = [a[j] for j in boot.integers(len(a), size=len(a))]
            rb = [b[j] for j in boot.integers(len(b), size=len(b))]
            draws.append(_empirical_tvd(ra, rb))
        lo, hi = np.percentile(draws, [2.5, 97.5])
        tvd[name] = {"tvd": point, "ci_lo": float(lo), "ci_hi": float(hi)}
    return OrderComparisonReport(tvd, float(np.mean(block0_g)),
                                 float(np.mean(block0_c)), n_samples)


def _nonabort(params: DistributionParams, gen, cap: int = 100_000):
    for _ in range(cap):
        out = sample_graph(params, gen)
        if not out.aborted:
            return out
    raise RuntimeError("could not draw a non-abort sample within the retry budget")


def _features(out, core) -> tuple:
    part = components(out.graph)
    comp_sizes = part.size_multiset()
    blocks = sorted(np.bincount(out.k_map[np.asarray(core, dtype=np.int64)]).tolist(), reverse=True)
    pattern = tuple(b for b in blocks if b)
    block0 = int((out.k_map == 0).sum())
    return (comp_sizes, pattern, block0)


def _empirical_tvd(a: list, b: list) -> float:
    support = set(a) | set(b)
    na, nb = len(a), len(b)
    ca, cb = {}, {}
    for x in a:
        ca[x] = ca.get(x, 0) + 1
    for x in b:
        cb[x] = cb.get(x, 0) + 1
    return 0.5 * sum(abs(ca.get(x, 0) / na - cb.get(x, 0) / nb) for x in support)


def order_comparison_params(params: DistributionParams) -> DistributionParams:
    """Strip the pinned set so both orders start from the same base."""
    return replace(params, pinned=())
