"""Small named graphs and seeded random graph generators."""
from __future__ import annotations

import numpy as np

from .graph import Graph, validate

# labels used by toy_graph(): t=0, v1..v9 = 1..9, s=10
TOY_T = 0
TOY_S = 10


def complete_graph(n: int) -> Graph:
    u, v = np.triu_indices(n, k=1)
    return Graph.from_edges(n, u, v)


def cycle_graph(n: int) -> Graph:
    u = np.arange(n)
    return Graph.from_edges(n, u, (u + 1) % n)


def path_graph(n: int) -> Graph:
    u = np.arange(n - 1)
    return Graph.from_edges(n, u, u + 1)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    u, v = zip(*(outer + spokes + inner))
    return Graph.from_edges(10, u, v)


def toy_graph() -> Graph:
    """The eleven-node running example: t joined to v1..v7, paths t-v2-v8-s and t-v1-v9-s."""
    edges = [(TOY_T, k) for k in range(1, 8)] + [(2, 8), (8, TOY_S), (1, 9), (9, TOY_S)]
    u, v = zip(*edges)
    return Graph.from_edges(11, u, v)


def star_with_triangle(leaves: int) -> Graph:
    """Star with centre 0 and leaves 1..leaves, plus the edge (1, 2) to break bipartiteness."""
    u = np.zeros(leaves, dtype=np.int64)
    v = np.arange(1, leaves + 1)
    return Graph.from_edges(leaves + 1, np.append(u, 1), np.append(v, 2))


def two_triangles() -> Graph:
    """Triangles {0,1,2} and {3,4,5} joined by the edge (2, 3)."""
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]
    u, v = zip(*edges)
    return Graph.from_edges(6, u, v)


def gnm_random_graph(n: int, m: int, seed=None) -> Graph:
    """Uniform simple graph with n nodes and (up to dedup) m edges."""
    rng = np.random.default_rng(seed)
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError("too many edges requested")
    picked = np.empty(0, dtype=np.int64)
    while picked.size < m:
        draw = rng.integers(0, n, size=(2 * (m - picked.size) + 16, 2))
        lo = np.minimum(draw[:, 0], draw[:, 1])
        hi = np.maximum(draw[:, 0], draw[:, 1])
        key = (lo * n + hi)[lo != hi]
        picked = np.unique(np.concatenate([picked, key]))
        if picked.size > m:
            picked = rng.choice(picked, size=m, replace=False)
    return Graph.from_edges(n, picked // n, picked % n)


def planted_partition_graph(n: int, blocks: int, d_in: float, d_out: float, seed=None) -> Graph:
    """Random graph with ``blocks`` equal groups; expected degree d_in inside, d_out across.

    Community structure keeps lambda well away from the random-graph value,
    so walk lengths stay non-trivial on large sparse instances.
    """
    if blocks < 2 or n < 2 * blocks:
        raise ValueError("need at least two blocks of two nodes")
    rng = np.random.default_rng(seed)
    size = n // blocks
    block = np.minimum(np.arange(n) // size, blocks - 1)
    starts = np.searchsorted(block, np.arange(blocks))
    counts = np.bincount(block, minlength=blocks)

    m_in = int(round(n * d_in / 2))
    u = rng.integers(0, n, size=m_in)
    b = block[u]
    v_in = starts[b] + (rng.random(m_in) * counts[b]).astype(np.int64)

    m_out = int(round(n * d_out / 2))
    x = rng.integers(0, n, size=m_out)
    shift = rng.integers(1, blocks, size=m_out)
    target_block = (block[x] + shift) % blocks
    v_out = starts[target_block] + (rng.random(m_out) * counts[target_block]).astype(np.int64)
    return Graph.from_edges(n, np.concatenate([u, x]), np.concatenate([v_in, v_out]))


def random_connected_graph(n: int, p: float, rng: np.random.Generator, max_tries: int = 1000) -> Graph:
    """G(n, p) conditioned on being connected and non-bipartite (rejection sampling)."""
    for _ in range(max_tries):
        mask = rng.random((n, n)) < p
        u, v = np.nonzero(np.triu(mask, k=1))
        g = Graph.from_edges(n, u, v)
        rep = validate(g)
        if rep.connected and not rep.bipartite:
            return g
    raise RuntimeError(f"no connected non-bipartite G({n}, {p}) after {max_tries} tries")


def random_graph_corpus(count: int, seed: int, n_min: int = 5, n_max: int = 30) -> list[Graph]:
    """Reproducible corpus of small connected non-bipartite random graphs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        p = float(rng.uniform(min(1.0, 2.5 * np.log(n) / n), 0.7))
        out.append(random_connected_graph(n, p, rng))
    return out
