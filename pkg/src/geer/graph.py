"""CSR graph storage, edge-list I/O, validation and random-walk primitives.

Graphs are simple, undirected and unweighted. Every undirected edge is stored
twice in the CSR arrays (once per direction), so ``indptr[-1] == 2 * m``.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import GraphFormatError

_DENSE_SWITCH = 0.25  # use the full CSR matvec once the support touches this share of entries


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable CSR adjacency.

    ``labels[i]`` is the external label of dense node ``i``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.labels):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, u, v, labels=None) -> "Graph":
        """Build from dense endpoint arrays; drops self-loops and duplicates."""
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        if u.shape != v.shape:
            raise ValueError("endpoint arrays differ in length")
        if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("node index out of range")
        keep = u != v
        lo = np.minimum(u[keep], v[keep])
        hi = np.maximum(u[keep], v[keep])
        key = np.unique(lo * n + hi)
        lo, hi = key // n, key % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        indices = dst[order]
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (n,):
            raise ValueError("labels must have one entry per node")
        return cls(indptr, indices.astype(np.int64), labels)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def m(self) -> int:
        return int(self.indptr[-1]) // 2

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.diff(self.indptr)
        deg.setflags(write=False)
        return deg

    @cached_property
    def id_map(self) -> dict[int, int]:
        return {int(lab): i for i, lab in enumerate(self.labels)}

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def _inv_degree(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            inv = np.where(self.degree > 0, 1.0 / np.maximum(self.degree, 1), 0.0)
        return inv

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def index_of(self, label: int) -> int:
        try:
            return self.id_map[int(label)]
        except KeyError:
            raise KeyError(f"unknown node label {label}") from None

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Each undirected edge once, as (lo, hi) dense index arrays."""
        src = np.repeat(np.arange(self.n), self.degree)
        mask = src < self.indices
        return src[mask], self.indices[mask]


@dataclass(frozen=True)
class ValidationReport:
    connected: bool
    bipartite: bool
    isolated_nodes: list[int] = field(default_factory=list)


# ----------------------------------------------------------------------------
# ingestion


def load_edge_list(source: TextIO | Iterable[str]) -> Graph:
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` and blank lines are skipped. Labels are
    non-negative integers, remapped to dense indices in order of first
    appearance. Self-loops are dropped and repeated edges merged.
    """
    id_map: dict[int, int] = {}
    us: list[int] = []
    vs: list[int] = []
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected two labels, got {len(parts)} fields", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer label in {line!r}", lineno) from None
        if a < 0 or b < 0:
            raise GraphFormatError("labels must be non-negative", lineno)
        us.append(id_map.setdefault(a, len(id_map)))
        vs.append(id_map.setdefault(b, len(id_map)))
    if not id_map:
        raise GraphFormatError("edge list is empty")
    labels = np.fromiter(id_map.keys(), dtype=np.int64, count=len(id_map))
    return Graph.from_edges(len(id_map), us, vs, labels)


def read_edge_list(path: str | os.PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def write_edge_list(g: Graph, sink: TextIO) -> None:
    lo, hi = g.edges()
    lab = g.labels
    for a, b in zip(lab[lo].tolist(), lab[hi].tolist()):
        sink.write(f"{a} {b}\n")


def parse_edge_list(text: str) -> Graph:
    return load_edge_list(io.StringIO(text))


# ----------------------------------------------------------------------------
# structure


def neighbor_positions(g: Graph, nodes: np.ndarray) -> np.ndarray:
    """Positions in ``g.indices`` of all neighbours of ``nodes``, concatenated."""
    counts = g.degree[nodes]
    starts = g.indptr[nodes]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    before = np.cumsum(counts) - counts
    return np.repeat(starts - before, counts) + np.arange(total)


def _bfs_levels(g: Graph, root: int, level: np.ndarray) -> None:
    level[root] = 0
    frontier = np.array([root], dtype=np.int64)
    depth = 0
    while frontier.size:
        nbrs = g.indices[neighbor_positions(g, frontier)]
        nbrs = np.unique(nbrs[level[nbrs] < 0])
        depth += 1
        level[nbrs] = depth
        frontier = nbrs


def validate(g: Graph) -> ValidationReport:
    """Connectivity (reachability from node 0) and bipartiteness (BFS 2-colouring)."""
    level = np.full(g.n, -1, dtype=np.int64)
    _bfs_levels(g, 0, level)
    connected = bool((level >= 0).all())
    while (unseen := np.flatnonzero(level < 0)).size:
        _bfs_levels(g, int(unseen[0]), level)
    src = np.repeat(np.arange(g.n), g.degree)
    bipartite = bool(np.all((level[src] - level[g.indices]) % 2 != 0))
    isolated = np.flatnonzero(g.degree == 0).tolist()
    return ValidationReport(connected=connected, bipartite=bipartite, isolated_nodes=isolated)


def stationary(g: Graph) -> np.ndarray:
    """pi(v) = d(v) / 2m."""
    if g.m == 0:
        raise ValueError("stationary distribution undefined for a graph without edges")
    return g.degree / (2.0 * g.m)


def frontier_volume(g: Graph, x: np.ndarray) -> int:
    """Sum of degrees over the support of ``x``."""
    return int(g.degree[np.asarray(x) != 0].sum())


# ----------------------------------------------------------------------------
# random walks and the transition operator


def walk_step(g: Graph, cur: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Advance every walker in ``cur`` one step, using uniforms ``u`` in [0, 1)."""
    deg = g.degree[cur]
    if np.any(deg == 0):
        raise ValueError("random walk reached an isolated node")
    off = np.minimum((u * deg).astype(np.int64), deg - 1)
    return g.indices[g.indptr[cur] + off]


def sample_walk(g: Graph, origin: int, length: int, rng: np.random.Generator) -> np.ndarray:
    """Nodes visited by a simple random walk, excluding ``origin`` itself."""
    if length < 0:
        raise ValueError("walk length must be non-negative")
    if not 0 <= origin < g.n:
        raise ValueError(f"origin {origin} out of range")
    if length > 0 and g.degree[origin] == 0:
        raise ValueError(f"origin {origin} is isolated")
    walk = np.empty(length, dtype=np.int64)
    cur = np.array([origin], dtype=np.int64)
    for i in range(length):
        cur = walk_step(g, cur, rng.random(1))
        walk[i] = cur[0]
    return walk


def transition_apply(g: Graph, x: np.ndarray) -> np.ndarray:
    """y(u) = sum over neighbours v of u of x(v) / d(v).

    This pushes a probability distribution one step forward, so the entry
    sum is preserved. Sparse inputs are scattered from their support only.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"vector has shape {x.shape}, expected ({g.n},)")
    support = np.flatnonzero(x)
    if support.size == 0:
        return np.zeros(g.n)
    counts = g.degree[support]
    if counts.sum() > _DENSE_SWITCH * g.indices.size:
        return g.adjacency @ (x * g._inv_degree)
    vals = np.repeat(x[support] * g._inv_degree[support], counts)
    targets = g.indices[neighbor_positions(g, support)]
    return np.bincount(targets, weights=vals, minlength=g.n)


def count_walks(g: Graph, origin: int, max_len: int) -> list[int]:
    """Number of distinct walks of each length 1..max_len starting at ``origin``."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    a_int = sp.csr_matrix(
        (np.ones(g.indices.size, dtype=np.int64), g.indices, g.indptr), shape=(g.n, g.n)
    )
    c = np.zeros(g.n, dtype=np.int64)
    c[origin] = 1
    out = []
    for _ in range(max_len):
        # float shadow detects int64 overflow before it happens silently
        shadow = g.adjacency @ c.astype(np.float64)
        if shadow.sum() >= 2.0**62:
            raise OverflowError("walk count exceeds the 64-bit range")
        c = a_int @ c
        out.append(int(c.sum()))
    return out
