from __future__ import annotations

import time

import numpy as np

from ..errors import GraphTooLargeError, SpectralDegeneracyError
from ..graph import Graph, validate
from .common import Estimate, Method, check_node

EXACT_CAP = 2000
PINV_RTOL = 1e-9


def laplacian_pinv(g: Graph, cap: int = EXACT_CAP) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of D - A from its eigendecomposition."""
    if g.n > cap:
        raise GraphTooLargeError(f"exact ER limited to {cap} nodes, graph has {g.n}")
    if not validate(g).connected:
        raise SpectralDegeneracyError("exact ER requires a connected graph")
    L = np.diag(g.degree.astype(np.float64)) - g.adjacency.toarray()
    vals, vecs = np.linalg.eigh(L)
    keep = vals > PINV_RTOL * vals.max() if vals.size else vals > 0
    return (vecs[:, keep] / vals[keep]) @ vecs[:, keep].T


class ExactOracle:
    """Exact ER for many pairs of one graph; the pseudo-inverse is built once."""

    def __init__(self, g: Graph, cap: int = EXACT_CAP):
        self.g = g
        self.pinv = laplacian_pinv(g, cap)

    def er(self, s: int, t: int) -> float:
        if s == t:
            return 0.0
        Lp = self.pinv
        return float(Lp[s, s] + Lp[t, t] - Lp[s, t] - Lp[t, s])

    def query(self, s: int, t: int) -> Estimate:
        t0 = time.perf_counter_ns()
        value = self.er(check_node(self.g, s, "s"), check_node(self.g, t, "t"))
        return Estimate(value, Method.EXACT, elapsed_ns=time.perf_counter_ns() - t0)


def exact_er(g: Graph, s: int, t: int, cap: int = EXACT_CAP) -> float:
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    return ExactOracle(g, cap).er(s, t)
