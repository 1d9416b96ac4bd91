"""Exact simulation of the two-query distinguishing verifier.

The verifier holds a unit witness vector over vertices, runs one controlled
lazy-walk step against the graph oracle, post-selects the control register on
|+> and the color register on the uniform color state, and accepts iff the
surviving witness is not the uniform vertex state.  Post-selection reduces
the walk to the map psi -> (psi + A psi)/2, which the closed-form path uses;
a brute-force path simulates the full control x vertex x color state vector
and must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .graphs import ColoredGraph, OracleContext
from .randomness import make_rng
from .spectral import apply_normalized_adjacency, normalized_adjacency_matrix

_UNIT_TOL = 1e-9


def uniform_witness(n: int) -> np.ndarray:
    return np.full(n, 1.0 / math.sqrt(n))


def subset_witness(subset, n: int) -> np.ndarray:
    """Uniform superposition over ``subset``."""
    idx = np.asarray(sorted(int(v) for v in subset), dtype=np.int64)
    if idx.size == 0 or idx[0] < 0 or idx[-1] >= n:
        raise ValueError("subset must be a nonempty subset of the vertex range")
    w = np.zeros(n)
    w[idx] = 1.0 / math.sqrt(idx.size)
    return w


def ideal_witness(subset, n: int) -> np.ndarray:
    """The unit vector sqrt(|T|/N)|S> - sqrt(|S|/N)|T> for T the complement:
    orthogonal to uniform, and a 1-eigenvector whenever S is a union of
    connected components."""
    s = np.asarray(sorted(int(v) for v in subset), dtype=np.int64)
    if s.size == 0 or s.size >= n:
        raise ValueError("subset must be nonempty and proper")
    if s[0] < 0 or s[-1] >= n:
        raise ValueError("subset out of vertex range")
    t_size = n - s.size
    w = np.full(n, -math.sqrt(s.size / n) / math.sqrt(t_size))
    w[s] = math.sqrt(t_size / n) / math.sqrt(s.size)
    return w


def _check_unit(w: np.ndarray, n: int) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"witness length {w.shape} does not match N={n}")
    norm = np.linalg.norm(w)
    if abs(norm - 1.0) > _UNIT_TOL:
        raise ValueError(f"witness is not unit norm (|w| = {norm})")
    return w


@dataclass(frozen=True)
class VerifierOutcome:
    """p_step2: probability the control/color post-selection succeeds;
    p_accept: overall acceptance probability; overlap_uniform: squared
    overlap of the post-selected state with the uniform vertex state."""

    p_step2: float
    p_accept: float
    overlap_uniform: float

    def to_dict(self) -> dict:
        return {"p_step2": self.p_step2, "p_accept": self.p_accept,
                "overlap_uniform": self.overlap_uniform}


def acceptance_probability(g: ColoredGraph, witness: np.ndarray,
                           ctx: OracleContext | None = None) -> VerifierOutcome:
    """Exact acceptance probability via the post-selected map (w + Aw)/2.

    Charges two oracle queries on ``ctx`` (the walk unitary costs two table
    lookups per run, made in superposition).
    """
    w = _check_unit(witness, g.n)
    if ctx is not None:
        ctx.charge(2)
    psi = 0.5 * (w + apply_normalized_adjacency(g, w))
    p_step2 = float(psi @ psi)
    u = uniform_witness(g.n)
    overlap = float(u @ psi) ** 2
    return VerifierOutcome(p_step2, p_step2 - overlap, overlap)


def acceptance_probability_statevector(g: ColoredGraph, witness: np.ndarray) -> VerifierOutcome:
    """Brute-force path: evolve the full (control x vertex x color) state of
    dimension 2*N*d and apply the three projective measurements literally."""
    w = _check_unit(witness, g.n)
    n, d = g.n, g.degree
    state = np.zeros((2, n, d))
    state[0] = w[:, None] / math.sqrt(2 * d)
    state[1] = w[:, None] / math.sqrt(2 * d)
    # controlled walk unitary |j, kappa> -> |adj(j, kappa), kappa> on the
    # control=1 branch; per color the table is an involution, so gathering
    # along it applies the permutation
    walked = np.empty_like(state[1])
    for kappa in range(d):
        walked[:, kappa] = state[1][g.adj[:, kappa], kappa]
    state[1] = walked
    # project control onto |+> and color onto the uniform color state
    plus = (state[0] + state[1]) / math.sqrt(2)       # (n, d)
    psi = plus.sum(axis=1) / math.sqrt(d)             # (n,)
    p_step2 = float(psi @ psi)
    u = uniform_witness(n)
    overlap = float(u @ psi) ** 2
    return VerifierOutcome(p_step2, p_step2 - overlap, overlap)


def optimal_acceptance(g: ColoredGraph, dense_threshold: int = 4096) -> float:
    """max over unit witnesses of the acceptance probability: the top
    eigenvalue of W (I - P_uniform) W with W = (I + A)/2.  Dense only; the
    top eigenspace is near-degenerate on disconnected graphs."""
    n = g.n
    if n > dense_threshold:
        raise ValueError(f"optimal_acceptance is dense-only (N <= {dense_threshold})")
    a = normalized_adjacency_matrix(g)
    walk = 0.5 * (np.eye(n) + a)
    u = uniform_witness(n)
    proj = np.eye(n) - np.outer(u, u)
    op = walk @ proj @ walk
    return float(np.linalg.eigvalsh(op)[-1])


def repeated_acceptance(p: float, reps: int, rule: str = "all-accept") -> float:
    """Probability that ``reps`` independent repetitions accept under the
    combining rule, each repetition drawing a fresh witness register."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if rule == "all-accept":
        return float(p) ** reps
    if rule == "majority":
        # accept iff strictly more than half of the repetitions accept
        return float(binom.sf(reps // 2, reps, p))
    raise ValueError(f"unknown combining rule {rule!r}")


def solve_reps(p_no: float, target: float = 0.01) -> int:
    """Smallest all-accept repetition count driving soundness ``p_no`` below
    ``target``."""
    if not 0.0 < p_no < 1.0:
        raise ValueError("p_no must be strictly between 0 and 1")
    if not 0.0 < target < 1.0:
        raise ValueError("target must be strictly between 0 and 1")
    return int(math.ceil(math.log(target) / math.log(p_no)))


@dataclass(frozen=True)
class DistributionAcceptance:
    mean: float
    stderr: float
    n_samples: int
    per_sample: tuple


def expectation_over_distribution(sampler, witness, n_samples: int, rng,
                                  ctx: OracleContext | None = None) -> DistributionAcceptance:
    """Monte Carlo mean of the exact per-graph acceptance probability over a
    graph distribution.

    ``sampler(rng) -> ColoredGraph`` supplies the graphs.  ``witness`` is a
    fixed vector, the string "optimal" (per-graph best witness), or a
    callable ``graph -> vector``.
    """
    gen = make_rng(rng)
    values = np.empty(n_samples)
    for i in range(n_samples):
        graph = sampler(gen)
        if isinstance(witness, str):
            if witness != "optimal":
                raise ValueError(f"unknown witness selector {witness!r}")
            if ctx is not None:
                ctx.charge(2)
            values[i] = optimal_acceptance(graph)
        else:
            w = witness(graph) if callable(witness) else witness
            values[i] = acceptance_probability(graph, w, ctx=ctx).p_accept
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return DistributionAcceptance(mean, stderr, n_samples, tuple(float(v) for v in values))
