"""Samplers for the block-matching graph distributions and their restrictions.

The base distribution builds a supergraph of ``ell`` blocks (each a union of
``d`` uniform perfect matchings on ``m/ell`` super-vertices), throws the N
real vertices into blocks uniformly at random with a pinned subset forced
into block 0, embeds them injectively, induces the edges and fills every
uncovered (vertex, color) slot with a self-loop.  Restrictions (component
confined to a target set, component-profile conditioning) are realized by
rejection with explicit retry budgets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graphs import ColoredGraph, ComponentPartition, all_self_loop_graph, components
from .randomness import coins_of, make_rng


@dataclass(frozen=True)
class DistributionParams:
    """Parameters of the blocked-matching distribution.

    ``n``: graph vertices; ``m``: super-vertices (>= n); ``ell``: block count
    dividing m with even block size; ``d``: degree; ``pinned``: vertices forced
    into block 0; ``seed``: root seed used when no stream is supplied.
    """

    n: int
    m: int
    ell: int
    d: int
    pinned: tuple = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pinned", tuple(int(v) for v in self.pinned))
        if self.m < self.n:
            raise ValueError(f"need m >= n, got m={self.m} n={self.n}")
        if self.m % self.ell:
            raise ValueError(f"ell={self.ell} must divide m={self.m}")
        if (self.m // self.ell) % 2:
            raise ValueError(f"block size m/ell={self.m // self.ell} must be even")
        if len(self.pinned) > self.m // self.ell:
            raise ValueError("pinned set larger than a block")
        if len(set(self.pinned)) != len(self.pinned):
            raise ValueError("pinned vertices must be distinct")
        if self.pinned and not all(0 <= v < self.n for v in self.pinned):
            raise ValueError("pinned vertices out of range")
        if self.d < 1 or self.n < 1 or self.ell < 1:
            raise ValueError("n, d, ell must be positive")

    @property
    def zeta(self) -> int:
        """Block size m/ell (the size of the covering sets)."""
        return self.m // self.ell

    @property
    def z(self) -> float:
        """Nominal component size n/ell."""
        return self.n / self.ell

    @property
    def gamma(self) -> float:
        """Slack factor m/n - 1."""
        return self.m / self.n - 1.0


def desk_params(n: int = 256, d: int = 8, ell: int = 4, gamma: float = 1 / 16,
                pinned: tuple = (), seed: int = 0) -> DistributionParams:
    """Desk-scale preset: m is the smallest multiple of 2*ell at least (1+gamma)*n."""
    step = 2 * ell
    m = int(math.ceil((1 + gamma) * n / step)) * step
    return DistributionParams(n=n, m=m, ell=ell, d=d, pinned=pinned, seed=seed)


def paper_scale_params(n_bits: int, pinned: tuple = (), seed: int = 0) -> DistributionParams:
    """The asymptotic constants (d=100, ell=N^{1/10}, gamma=N^{-1/10}, m=(1+gamma)N)
    for N = 2**n_bits.  Requires n_bits divisible by 10 so that ell and m are
    integral; intended for formula evaluation, not desk-scale sampling."""
    if n_bits % 10:
        raise ValueError("n_bits must be a multiple of 10 for integral constants")
    n = 2 ** n_bits
    ell = 2 ** (n_bits // 10)
    m = n + n // ell  # (1 + N^{-1/10}) * N
    if m % ell or (m // ell) % 2:
        raise ValueError("constants do not give an even integral block size at this n_bits")
    return DistributionParams(n=n, m=m, ell=ell, d=100, pinned=pinned, seed=seed)


@dataclass(frozen=True)
class SampleOutcome:
    """A sampled graph with its generation transcript."""

    graph: ColoredGraph
    k_map: np.ndarray
    iota: np.ndarray | None
    aborted: bool
    coins: tuple | None = None

    def block_preimage(self, block: int) -> np.ndarray:
        return np.flatnonzero(self.k_map == block)


@dataclass(frozen=True)
class RejectionResult:
    """Outcome of a rejection sampler; ``accepted`` is False when the retry
    budget ran out, with ``outcome`` left as None."""

    outcome: SampleOutcome | None
    attempts: int
    accepted: bool


def sample_block_graph(block_size: int, d: int, rng) -> ColoredGraph:
    """Union of d independently uniform perfect matchings, one per color."""
    if block_size < 2 or block_size % 2:
        raise ValueError(f"block size must be even and >= 2, got {block_size}")
    rng = make_rng(rng)
    adj = np.empty((block_size, d), dtype=np.int64)
    for kappa in range(d):
        # a uniform shuffle paired off consecutively is exactly uniform over matchings
        perm = rng.permutation(block_size)
        adj[perm[0::2], kappa] = perm[1::2]
        adj[perm[1::2], kappa] = perm[0::2]
    return ColoredGraph(adj)


def sample_graph(params: DistributionParams, rng=None) -> SampleOutcome:
    """Draw one graph from the blocked-matching distribution.

    Pipeline: block supergraph, uniform block map (pinned set forced to
    block 0), injective embedding without replacement (abort to the
    all-self-loop graph when a block overflows), edge induction, self-loop
    fill.  The abort atom is part of the distribution and is flagged, never
    hidden.
    """
    coins = coins_of(rng if rng is not None else params.seed)
    gen = make_rng(rng, default_seed=params.seed)
    n, m, ell, d, zeta = params.n, params.m, params.ell, params.d, params.zeta

    super_adj = np.empty((m, d), dtype=np.int64)
    for b in range(ell):
        block = sample_block_graph(zeta, d, gen)
        super_adj[b * zeta:(b + 1) * zeta] = block.adj + b * zeta

    k_map = np.empty(n, dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    if params.pinned:
        pinned = np.array(params.pinned, dtype=np.int64)
        k_map[pinned] = 0
        mask[pinned] = False
    free = np.flatnonzero(mask)
    k_map[free] = gen.integers(0, ell, size=free.size)

    available = [list(range(b * zeta, (b + 1) * zeta)) for b in range(ell)]
    iota = np.empty(n, dtype=np.int64)
    aborted = False
    for j in range(n):
        slots = available[k_map[j]]
        if not slots:
            aborted = True
            break
        iota[j] = slots.pop(int(gen.integers(len(slots))))
    if aborted:
        # the abort graph must still be a valid oracle, so it is all self-loops
        return SampleOutcome(all_self_loop_graph(n, d), k_map, None, True, coins)

    embedded = np.full(m, -1, dtype=np.int64)
    embedded[iota] = np.arange(n)
    partner = embedded[super_adj[iota]]              # (n, d); -1 if outside the image
    loops = np.tile(np.arange(n)[:, None], (1, d))
    adj = np.where(partner >= 0, partner, loops)
    return SampleOutcome(ColoredGraph(adj), k_map, iota, False, coins)


def sample_nonaborting(params: DistributionParams, rng=None,
                       max_retries: int = 10_000) -> RejectionResult:
    """Rejection to the non-abort part of the distribution."""
    gen = make_rng(rng, default_seed=params.seed)
    for attempt in range(1, max_retries + 1):
        out = sample_graph(params, gen)
        if not out.aborted:
            return RejectionResult(out, attempt, True)
    return RejectionResult(None, max_retries, False)


def sample_confined(params: DistributionParams, subset, rng=None,
                    max_retries: int = 100_000) -> RejectionResult:
    """Rejection to non-abort graphs owning a connected component inside ``subset``.

    ``subset`` must have exactly ``params.zeta`` elements and ``params.pinned``
    must be empty.  Acceptance can be astronomically rare for a fixed subset
    away from tiny scales; the retry budget and attempt count let callers
    detect that instead of hanging.  See :func:`sample_cover_pair` for the
    exchangeable construction that sidesteps the rejection at desk scale.
    """
    target = frozenset(int(v) for v in subset)
    if len(target) != params.zeta:
        raise ValueError(f"subset must have zeta={params.zeta} elements, got {len(target)}")
    if params.pinned:
        raise ValueError("confined sampling is defined over the unpinned distribution")
    gen = make_rng(rng, default_seed=params.seed)
    for attempt in range(1, max_retries + 1):
        out = sample_graph(params, gen)
        if out.aborted:
            continue
        part = components(out.graph)
        sizes = part.sizes
        labels = part.labels
        hit = False
        for comp in range(part.n_components):
            if sizes[comp] <= len(target) and set(np.flatnonzero(labels == comp).tolist()) <= target:
                hit = True
                break
        if hit:
            return RejectionResult(out, attempt, True)
    return RejectionResult(None, max_retries, False)


def sample_conditioned(params: DistributionParams, predicate, rng=None,
                       max_retries: int = 100_000) -> RejectionResult:
    """Rejection until ``predicate(graph, partition)`` holds.

    Aborted draws are passed through the predicate too (their partition is
    all singletons), so conditioning on e.g. connectivity automatically
    excludes them.
    """
    gen = make_rng(rng, default_seed=params.seed)
    for attempt in range(1, max_retries + 1):
        out = sample_graph(params, gen)
        part = components(out.graph)
        if predicate(out.graph, part):
            return RejectionResult(out, attempt, True)
    return RejectionResult(None, max_retries, False)


# -- predicates ---------------------------------------------------------------

def exactly_components(count: int):
    def pred(graph, partition: ComponentPartition) -> bool:
        return partition.n_components == count
    return pred


def connected(graph, partition: ComponentPartition) -> bool:
    return partition.n_components == 1


def component_profile(count: int, lo: float, hi: float):
    """Exactly ``count`` components, every size within [lo, hi]."""
    def pred(graph, partition: ComponentPartition) -> bool:
        return (partition.n_components == count
                and bool((partition.sizes >= lo).all())
                and bool((partition.sizes <= hi).all()))
    return pred


def profile_for(params: DistributionParams):
    """The canonical profile for these params: ell components with sizes in
    [(1-gamma)z, (1+gamma)z]."""
    return component_profile(params.ell, (1 - params.gamma) * params.z,
                             (1 + params.gamma) * params.z)


# -- covered-component pairs --------------------------------------------------

def sample_cover_pair(params: DistributionParams, rng=None,
                      max_retries: int = 100_000) -> tuple[SampleOutcome, frozenset]:
    """Draw (graph, S): a profile-conditioned graph together with a zeta-set S
    covering one of its components, S uniform over the covering sets of the
    graph.

    This is the desk-scale stand-in for fixing S first and rejection-sampling
    graphs confined to it (which has astronomically small acceptance away
    from tiny n): every pair it emits satisfies the confinement and the
    component profile, which is what the per-sample acceptance guarantees
    quantify over.  Picking the covered component with probability
    proportional to its number of zeta-supersets makes S | graph exactly
    uniform over covering sets; under the profile no zeta-set can cover two
    components, so those events partition the covers.
    """
    if params.pinned:
        raise ValueError("cover pairs are defined over the unpinned distribution")
    if 2 * (1 - params.gamma) * params.z <= params.zeta:
        raise ValueError("profile permits a zeta-set covering two components; "
                         "cover counting needs gamma < 1/3")
    gen = make_rng(rng, default_seed=params.seed)
    pred = profile_for(params)
    n, zeta = params.n, params.zeta
    for _ in range(max_retries):
        out = sample_graph(params, gen)
        part = components(out.graph)
        if not pred(out.graph, part):
            continue
        # number of zeta-supersets of each component, in log space
        logw = np.array([_log_comb(n - int(s), zeta - int(s)) for s in part.sizes])
        w = np.exp(logw - logw.max())
        w /= w.sum()
        comp = int(gen.choice(part.n_components, p=w))
        comp_vertices = part.members(comp)
        rest = np.setdiff1d(np.arange(n), comp_vertices, assume_unique=True)
        extra = gen.choice(rest, size=zeta - comp_vertices.size, replace=False)
        return out, frozenset(int(v) for v in comp_vertices) | frozenset(int(v) for v in extra)
    raise RuntimeError("no profile-conforming sample within the retry budget")


def _log_comb(a: int, b: int) -> float:
    if b < 0 or b > a:
        return -np.inf
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


# -- triangle statistics ------------------------------------------------------

@dataclass(frozen=True)
class TriangleReport:
    count: int
    per_component: tuple


def triangle_count(g: ColoredGraph) -> TriangleReport:
    """Unordered triangles on distinct vertices of the uncolored simple graph
    (parallel colored edges count once, self-loops ignored)."""
    n, d = g.adj.shape
    masks = [0] * n
    edges = set()
    for j in range(n):
        row = g.adj[j]
        for v in row:
            v = int(v)
            if v != j:
                masks[j] |= 1 << v
                edges.add((j, v) if j < v else (v, j))
    part = components(g)
    per = [0] * part.n_components
    total = 0
    for u, v in edges:
        common = bin(masks[u] & masks[v]).count("1")
        total += common
        per[int(part.labels[u])] += common
    # each triangle was seen once per edge
    assert total % 3 == 0 and all(c % 3 == 0 for c in per)
    return TriangleReport(total // 3, tuple(c // 3 for c in per))


def single_block_params(params: DistributionParams, seed: int | None = None) -> DistributionParams:
    """The one-block baseline at this params' block scale: n' = n/ell real
    vertices over m' = zeta super-vertices."""
    if params.n % params.ell:
        raise ValueError("n must be divisible by ell for the block-scale baseline")
    return DistributionParams(n=params.n // params.ell, m=params.zeta, ell=1,
                              d=params.d, pinned=(),
                              seed=params.seed if seed is None else seed)


def triangle_comparison(params: DistributionParams, n_samples: int, rng=None,
                        baseline: DistributionParams | None = None) -> dict:
    """Mean triangle counts of the multi-block distribution vs the one-block
    baseline at block scale, over non-abort samples; the interesting figure
    is their ratio, which tracks the block count."""
    gen = make_rng(rng, default_seed=params.seed)
    base = baseline if baseline is not None else single_block_params(params)
    counts, base_counts, aborts = [], [], 0
    while len(counts) < n_samples:
        out = sample_graph(params, gen)
        if out.aborted:
            aborts += 1
            continue
        counts.append(triangle_count(out.graph).count)
    base_aborts = 0
    while len(base_counts) < n_samples:
        out = sample_graph(base, gen)
        if out.aborted:
            base_aborts += 1
            continue
        base_counts.append(triangle_count(out.graph).count)
    mean = float(np.mean(counts))
    base_mean = float(np.mean(base_counts))
    return {
        "mean": mean,
        "baseline_mean": base_mean,
        "ratio": mean / base_mean if base_mean else float("inf"),
        "abort_rate": aborts / (aborts + n_samples),
        "baseline_abort_rate": base_aborts / (base_aborts + n_samples),
        "n_samples": n_samples,
    }


def with_pinned(params: DistributionParams, pinned) -> DistributionParams:
    return replace(params, pinned=tuple(int(v) for v in pinned))
