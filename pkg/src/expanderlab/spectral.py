"""Normalized adjacency operators, second-eigenvalue estimation, lazy-walk
mixing and small-instance expansion brute force.

Conventions: the normalized adjacency A of a d-regular d-colored graph is
(Av)_j = (1/d) * sum_kappa v[adj(j, kappa)].  A self-loop contributes 1/d to
the diagonal per color slot.  A is symmetric because every color class is an
involution, its row sums are 1, and its spectrum lies in [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graphs import ColoredGraph, components, restrict_to


def apply_normalized_adjacency(g: ColoredGraph, v: np.ndarray) -> np.ndarray:
    """Matrix-free A @ v."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (g.n,):
        raise ValueError(f"vector length {v.shape} does not match N={g.n}")
    out = np.zeros(g.n, dtype=np.float64)
    for kappa in range(g.degree):
        out += v[g.adj[:, kappa]]
    return out / g.degree


def normalized_adjacency_matrix(g: ColoredGraph) -> np.ndarray:
    """Dense N x N normalized adjacency."""
    a = np.zeros((g.n, g.n), dtype=np.float64)
    rows = np.arange(g.n)
    for kappa in range(g.degree):
        np.add.at(a, (rows, g.adj[:, kappa]), 1.0 / g.degree)
    return a


@dataclass(frozen=True)
class EigenEstimate:
    value: float
    method: str          # "dense" or "power"
    converged: bool
    iterations: int


def second_eigenvalue(g: ColoredGraph, tol: float = 1e-10, max_iter: int = 100_000,
                      dense_threshold: int = 4096, seed: int = 0) -> EigenEstimate:
    """Second-largest eigenvalue of the normalized adjacency.

    Below ``dense_threshold`` this is an exact dense symmetric
    eigendecomposition.  Above it, power iteration runs on the shifted
    operator (I + A)/2 deflated against the uniform vector, with a residual
    stopping test (for symmetric operators the Rayleigh value is then within
    ``tol`` of a true eigenvalue).  Non-convergence is flagged, never silent.
    """
    if g.n < 2:
        raise ValueError("second eigenvalue needs at least 2 vertices")
    if g.n <= dense_threshold:
        vals = np.linalg.eigvalsh(normalized_adjacency_matrix(g))
        return EigenEstimate(float(vals[-2]), "dense", True, 0)

    u = np.full(g.n, 1.0 / np.sqrt(g.n))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.n)
    v -= u * (u @ v)
    v /= np.linalg.norm(v)
    mu = 0.0
    for it in range(1, max_iter + 1):
        # shifted operator (I+A)/2 keeps the spectrum in [0,1] so the
        # dominant deflated direction is the second-largest, not the
        # largest-magnitude, eigenvalue
        w = 0.5 * (v + apply_normalized_adjacency(g, v))
        w -= u * (u @ w)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return EigenEstimate(-1.0, "power", True, it)
        w /= norm
        aw = 0.5 * (w + apply_normalized_adjacency(g, w))
        aw -= u * (u @ aw)
        mu = float(w @ aw)
        residual = np.linalg.norm(aw - mu * w)
        v = w
        if residual <= tol:
            return EigenEstimate(2.0 * mu - 1.0, "power", True, it)
    return EigenEstimate(2.0 * mu - 1.0, "power", False, max_iter)


@dataclass(frozen=True)
class SpectralReport:
    """Second eigenvalue, spectral gap and expansion verdicts for one graph."""

    lambda2: float
    gap: float
    component_sizes: tuple
    per_component_gaps: tuple | None
    method: str
    converged: bool
    iterations: int

    @property
    def n_components(self) -> int:
        return len(self.component_sizes)

    @property
    def connected(self) -> bool:
        return self.n_components == 1

    def is_alpha_expander(self, alpha0: float) -> bool:
        return self.connected and self.lambda2 <= 1.0 - alpha0

    def to_dict(self) -> dict:
        return {
            "lambda2": self.lambda2,
            "gap": self.gap,
            "component_sizes": list(self.component_sizes),
            "per_component_gaps": None if self.per_component_gaps is None
            else list(self.per_component_gaps),
            "method": self.method,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def spectral_report(g: ColoredGraph, tol: float = 1e-10, max_iter: int = 100_000,
                    dense_threshold: int = 4096) -> SpectralReport:
    """Full spectral summary; disconnected graphs get per-component gaps
    (each component is itself d-regular, so its normalized adjacency is just
    the restriction)."""
    part = components(g)
    est = second_eigenvalue(g, tol=tol, max_iter=max_iter, dense_threshold=dense_threshold)
    if part.n_components == 1:
        return SpectralReport(est.value, 1.0 - est.value, part.size_multiset(),
                              None, est.method, est.converged, est.iterations)
    gaps = []
    for comp in range(part.n_components):
        verts = part.members(comp)
        if verts.size == 1:
            gaps.append(0.0)
            continue
        sub = restrict_to(g, verts)
        sub_est = second_eigenvalue(sub, tol=tol, max_iter=max_iter,
                                    dense_threshold=dense_threshold)
        gaps.append(1.0 - sub_est.value)
    return SpectralReport(est.value, 0.0, part.size_multiset(), tuple(gaps),
                          est.method, est.converged, est.iterations)


def expanding(alpha: float, dense_threshold: int = 4096):
    """Predicate factory for conditional samplers: connected with gap >= alpha."""
    def pred(graph: ColoredGraph, partition) -> bool:
        if partition.n_components != 1:
            return False
        est = second_eigenvalue(graph, dense_threshold=dense_threshold)
        return est.value <= 1.0 - alpha
    return pred


@dataclass(frozen=True)
class WalkDistribution:
    probs: np.ndarray
    steps: int


def lazy_walk(g: ColoredGraph, start: np.ndarray, steps: int) -> WalkDistribution:
    """Exact distribution after ``steps`` applications of the lazy transition
    (I + A)/2; no Monte Carlo."""
    p = np.asarray(start, dtype=np.float64)
    if p.shape != (g.n,):
        raise ValueError("start distribution has wrong length")
    if (p < -1e-15).any() or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("start must be a probability vector")
    for _ in range(steps):
        p = 0.5 * (p + apply_normalized_adjacency(g, p))
    return WalkDistribution(p, steps)


def mixing_deviation(g: ColoredGraph, start: np.ndarray, steps: int) -> float:
    """max_v |Pr[v] - 1/N| after the lazy walk."""
    dist = lazy_walk(g, start, steps)
    return float(np.abs(dist.probs - 1.0 / g.n).max())


# -- small-instance brute force ------------------------------------------------

_EXPANSION_LIMIT = 24


def edge_expansion_exact(g: ColoredGraph) -> float:
    """min over nonempty U with |U| <= N/2 of |boundary(U)| / |U|, where the
    boundary is the set of neighbors of U outside U (colors and self-loops
    ignored).  Exhaustive over all subsets, so N <= 24."""
    return _expansion_brute(g)[0]


def conductance_exact(g: ColoredGraph) -> float:
    """min over nonempty U with |U| <= N/2 of crossing colored edges / (d |U|),
    parallel colors counted with multiplicity so the quantity matches the
    normalized adjacency and is bounded two-sidedly by the spectral gap
    through Cheeger's inequality."""
    return _expansion_brute(g)[1]


def _expansion_brute(g: ColoredGraph) -> tuple[float, float]:
    n, d = g.n, g.degree
    if n > _EXPANSION_LIMIT:
        raise ValueError(f"subset enumeration refuses N > {_EXPANSION_LIMIT}; "
                         "use spectral certification instead")
    rows = [[int(v) for v in g.adj[j]] for j in range(n)]
    best_vertex = np.inf
    best_edge = np.inf
    for size in range(1, n // 2 + 1):
        for u in combinations(range(n), size):
            u_set = set(u)
            boundary = set()
            cross = 0
            for j in u:
                for v in rows[j]:
                    if v != j and v not in u_set:
                        boundary.add(v)
                        cross += 1
            best_vertex = min(best_vertex, len(boundary) / size)
            best_edge = min(best_edge, cross / (d * size))
    return float(best_vertex), float(best_edge)
