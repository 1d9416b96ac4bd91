"""d-regular d-colored graphs presented as classical adjacency oracles.

A graph on N vertices is a total table ``(vertex, color) -> vertex`` whose
per-color maps are involutions (color classes are partial matchings plus
self-loops).  Vertices are dense integers ``0..N-1`` and colors ``0..d-1``.
Graphs are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

_MAGIC = b"CGPH"
_VERSION = 1


@dataclass(frozen=True)
class ColoredGraph:
    """Adjacency table of a d-regular d-colored graph; ``adj[j, kappa]`` is the
    neighbor of ``j`` along color ``kappa`` (possibly ``j`` itself)."""

    adj: np.ndarray

    def __post_init__(self):
        adj = np.ascontiguousarray(self.adj, dtype=np.int64)
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)
        if adj.ndim != 2 or adj.shape[0] < 1 or adj.shape[1] < 1:
            raise ValueError(f"adjacency table must be (N, d), got {adj.shape}")

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def degree(self) -> int:
        return self.adj.shape[1]

    def neighbor(self, j: int, kappa: int) -> int:
        """The single oracle primitive: neighbor of ``j`` along color ``kappa``."""
        if not (0 <= j < self.n):
            raise IndexError(f"vertex {j} out of range [0, {self.n})")
        if not (0 <= kappa < self.degree):
            raise IndexError(f"color {kappa} out of range [0, {self.degree})")
        return int(self.adj[j, kappa])

    def __eq__(self, other):
        return isinstance(other, ColoredGraph) and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.degree, self.adj.tobytes()))


class OracleContext:
    """Per-experiment query accounting around a graph oracle.

    Classical walks query through :meth:`neighbor` (one unit each); the
    simulated two-query verifier books its superposed queries via
    :meth:`charge`.  Pure utilities (validation, component finding) never
    touch the counter.  One context per thread.
    """

    def __init__(self, graph: ColoredGraph):
        self.graph = graph
        self.queries = 0

    def neighbor(self, j: int, kappa: int) -> int:
        self.queries += 1
        return self.graph.neighbor(j, kappa)

    def charge(self, n: int = 1) -> None:
        self.queries += n


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``0..n-1`` with its inverse cached."""

    forward: np.ndarray
    inverse: np.ndarray = field(default=None)

    def __post_init__(self):
        fwd = np.ascontiguousarray(self.forward, dtype=np.int64)
        n = fwd.shape[0]
        if sorted(fwd.tolist()) != list(range(n)):
            raise ValueError("forward table is not a permutation of 0..n-1")
        inv = self.inverse
        if inv is None:
            inv = np.empty(n, dtype=np.int64)
            inv[fwd] = np.arange(n)
        else:
            inv = np.ascontiguousarray(inv, dtype=np.int64)
            if not np.array_equal(inv[fwd], np.arange(n)):
                raise ValueError("inverse does not invert forward")
        fwd.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "inverse", inv)

    @property
    def n(self) -> int:
        return self.forward.shape[0]

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(n))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Permutation":
        fwd = np.arange(n)
        fwd[[a, b]] = fwd[[b, a]]
        return cls(fwd)

    def inverted(self) -> "Permutation":
        return Permutation(self.inverse, self.forward)


@dataclass(frozen=True)
class ComponentPartition:
    """Connected-component labels (colors ignored) and component sizes."""

    labels: np.ndarray
    sizes: np.ndarray

    @property
    def n_components(self) -> int:
        return self.sizes.shape[0]

    def size_multiset(self) -> tuple:
        return tuple(sorted(int(s) for s in self.sizes))

    def members(self, comp: int) -> np.ndarray:
        return np.flatnonzero(self.labels == comp)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violation: tuple | None = None
    reason: str = ""


def validate(g: ColoredGraph) -> ValidationReport:
    """Check totality (in-range entries) and the per-color involution."""
    adj = g.adj
    n, d = adj.shape
    bad = (adj < 0) | (adj >= n)
    if bad.any():
        j, kappa = np.argwhere(bad)[0]
        return ValidationReport(False, (int(j), int(kappa)),
                                f"entry {adj[j, kappa]} out of range [0, {n})")
    cols = np.arange(n)
    for kappa in range(d):
        back = adj[adj[:, kappa], kappa]
        off = np.flatnonzero(back != cols)
        if off.size:
            j = int(off[0])
            return ValidationReport(False, (j, int(kappa)),
                                    f"involution broken: adj(adj({j},{kappa}),{kappa}) = {int(back[j])}")
    return ValidationReport(True)


def components(g: ColoredGraph) -> ComponentPartition:
    """Connected components over the union of all color classes."""
    n, d = g.adj.shape
    rows = np.repeat(np.arange(n), d)
    mat = csr_matrix((np.ones(n * d, dtype=np.int8), (rows, g.adj.ravel())), shape=(n, n))
    _, labels = _cc(mat, directed=False)
    sizes = np.bincount(labels)
    return ComponentPartition(labels, sizes)


def relabel(g: ColoredGraph, perm: Permutation) -> ColoredGraph:
    """Pull the graph back through ``perm``: adj'(j, k) = perm^-1(adj(perm(j), k))."""
    if perm.n != g.n:
        raise ValueError("permutation size does not match graph")
    return ColoredGraph(perm.inverse[g.adj[perm.forward]])


def restrict_to(g: ColoredGraph, vertices) -> ColoredGraph:
    """Induced subgraph on ``vertices``, which must be closed under all colors
    (e.g. a union of connected components); vertices are re-indexed densely."""
    verts = np.asarray(sorted(int(v) for v in vertices), dtype=np.int64)
    index = np.full(g.n, -1, dtype=np.int64)
    index[verts] = np.arange(verts.size)
    sub = index[g.adj[verts]]
    if (sub < 0).any():
        raise ValueError("vertex set is not closed under the color maps")
    return ColoredGraph(sub)


# -- fixture builders ---------------------------------------------------------

def all_self_loop_graph(n: int, d: int) -> ColoredGraph:
    """Every color of every vertex is a self-loop; N singleton components."""
    return ColoredGraph(np.tile(np.arange(n)[:, None], (1, d)))


def two_colored_cycle(n: int) -> ColoredGraph:
    """N-cycle (N even) as two perfect matchings: color 0 pairs (2i, 2i+1),
    color 1 pairs (2i+1, 2i+2)."""
    if n % 2 or n < 2:
        raise ValueError("cycle needs an even vertex count >= 2")
    adj = np.empty((n, 2), dtype=np.int64)
    idx = np.arange(n)
    adj[:, 0] = np.where(idx % 2 == 0, idx + 1, idx - 1)
    adj[:, 1] = np.where(idx % 2 == 0, idx - 1, idx + 1) % n
    return ColoredGraph(adj)


def complete_four_graph() -> ColoredGraph:
    """K4 under its proper 3-edge-coloring (three disjoint perfect matchings)."""
    adj = np.array([[1, 2, 3],
                    [0, 3, 2],
                    [3, 0, 1],
                    [2, 1, 0]], dtype=np.int64)
    return ColoredGraph(adj)


def disjoint_union(*graphs: ColoredGraph) -> ColoredGraph:
    """Disjoint union of graphs with equal degree."""
    d = graphs[0].degree
    if any(g.degree != d for g in graphs):
        raise ValueError("all graphs must share a degree")
    parts, offset = [], 0
    for g in graphs:
        parts.append(g.adj + offset)
        offset += g.n
    return ColoredGraph(np.vstack(parts))


# -- serialization ------------------------------------------------------------

def save_graph(g: ColoredGraph, path) -> None:
    """Versioned little-endian binary: header {magic, version, N, d}, then
    the N*d neighbor entries in row-major (vertex, color) order."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIQI", _MAGIC, _VERSION, g.n, g.degree))
        fh.write(g.adj.astype("<u4").tobytes())


def load_graph(path) -> ColoredGraph:
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<4sIQI"))
        magic, version, n, d = struct.unpack("<4sIQI", header)
        if magic != _MAGIC:
            raise ValueError(f"not a graph file: bad magic {magic!r}")
        if version != _VERSION:
            raise ValueError(f"unsupported graph file version {version}")
        body = fh.read(n * d * 4)
    if len(body) != n * d * 4:
        raise ValueError("truncated graph file")
    adj = np.frombuffer(body, dtype="<u4").astype(np.int64).reshape(n, d)
    return ColoredGraph(adj)


def save_graph_csv(g: ColoredGraph, path) -> None:
    """Text form, one ``vertex,color,neighbor`` triple per line."""
    with open(path, "w") as fh:
        fh.write("j,kappa,neighbor\n")
        for j in range(g.n):
            for kappa in range(g.degree):
                fh.write(f"{j},{kappa},{int(g.adj[j, kappa])}\n")


def load_graph_csv(path) -> ColoredGraph:
    """Read hand-written ``j,kappa,neighbor`` fixtures; N and d are inferred
    and the table must be total."""
    triples = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("j,"):
                continue
            j, kappa, v = (int(x) for x in line.split(","))
            triples.append((j, kappa, v))
    if not triples:
        raise ValueError("empty graph fixture")
    n = max(max(j, v) for j, _, v in triples) + 1
    d = max(kappa for _, kappa, _ in triples) + 1
    adj = np.full((n, d), -1, dtype=np.int64)
    for j, kappa, v in triples:
        adj[j, kappa] = v
    if (adj < 0).any():
        j, kappa = np.argwhere(adj < 0)[0]
        raise ValueError(f"fixture is not total: missing entry for ({int(j)},{int(kappa)})")
    return ColoredGraph(adj)
