"""Deterministic truncated-series evaluation by repeated transition products.

Internally the iterates are forward distributions x_s = p_i(s, .), kept on
their support so one iteration costs the volume of that support. The walk-probability vectors into s are
recovered by reversibility, p_i(v, s) = p_i(s, v) d(s) / d(v), which is what
the hybrid estimator hands to the sampling stage.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .._kernels import smm_step
from ..bounds import ErrorBudget
from ..graph import Graph
from ..spectral import SpectralMeta
from .common import Estimate, Method, check_node, query_ell


def series_term(g: Graph, s: int, t: int, x_s: np.ndarray, x_t: np.ndarray) -> float:
    """p_i(s,s)/d(s) + p_i(t,t)/d(t) - p_i(s,t)/d(t) - p_i(t,s)/d(s) from forward iterates."""
    ds, dt = g.degree[s], g.degree[t]
    return x_s[s] / ds + x_t[t] / dt - x_s[t] / dt - x_t[s] / ds


def to_incoming(g: Graph, origin: int, x: np.ndarray) -> np.ndarray:
    """p(v, origin) from p(origin, v)."""
    return x * (g.degree[origin] / np.maximum(g.degree, 1))


def one_hot(n: int, v: int) -> np.ndarray:
    e = np.zeros(n)
    e[v] = 1.0
    return e


@dataclass
class Frontier:
    """Forward iterate p_i(origin, .) stored on its support only."""

    origin: int
    idx: np.ndarray
    val: np.ndarray

    @classmethod
    def start(cls, origin: int) -> "Frontier":
        return cls(origin, np.array([origin], dtype=np.int64), np.ones(1))

    def at(self, v: int) -> float:
        return float(self.val[self.idx == v].sum())

    def volume(self, g: Graph) -> int:
        return int(g.degree[self.idx].sum())

    def incoming(self, g: Graph) -> np.ndarray:
        """p_i(v, origin) on the support, by reversibility."""
        return self.val * (g.degree[self.origin] / g.degree[self.idx])

    def dense(self, n: int) -> np.ndarray:
        x = np.zeros(n)
        x[self.idx] = self.val
        return x


def frontier_term(g: Graph, s: int, t: int, f_s: Frontier, f_t: Frontier) -> float:
    ds, dt = g.degree[s], g.degree[t]
    return f_s.at(s) / ds + f_t.at(t) / dt - f_s.at(t) / dt - f_t.at(s) / ds


def run_frontiers(
    g: Graph, s: int, t: int, ell_b: int, check: Callable[[], None] | None = None
) -> tuple[float, Frontier, Frontier]:
    scratch = np.zeros(g.n)
    f_s, f_t = Frontier.start(s), Frontier.start(t)
    r_b = frontier_term(g, s, t, f_s, f_t)
    idx_s, val_s, idx_t, val_t = f_s.idx, f_s.val, f_t.idx, f_t.val
    for _ in range(ell_b):
        if check is not None:
            check()
        idx_s, val_s, idx_t, val_t, term = smm_step(
            g.indptr, g.indices, s, t, idx_s, val_s, idx_t, val_t, scratch
        )
        r_b += term
    return float(r_b), Frontier(s, idx_s, val_s), Frontier(t, idx_t, val_t)


def smm(
    g: Graph,
    s: int,
    t: int,
    ell_b: int,
    *,
    check: Callable[[], None] | None = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Truncated series r_b through ``ell_b`` iterations.

    Returns ``(r_b, s_star, t_star)`` with s_star(v) = p_ell_b(v, s) and
    t_star(v) = p_ell_b(v, t).
    """
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    if ell_b < 0:
        raise ValueError("ell_b must be non-negative")
    r_b, f_s, f_t = run_frontiers(g, s, t, ell_b, check)
    return r_b, to_incoming(g, s, f_s.dense(g.n)), to_incoming(g, t, f_t.dense(g.n))


def smm_query(
    g: Graph, s: int, t: int, budget: ErrorBudget, meta: SpectralMeta, *, check=None,
    iterations: int | None = None,
) -> Estimate:
    """SMM run to the degree-aware truncation length for ``budget.epsilon``.

    ``iterations`` fixes the number of iterations instead (reference values).
    """
    t0 = time.perf_counter_ns()
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    ell = query_ell(g, s, t, budget.epsilon, meta) if iterations is None else int(iterations)
    r_b, _, _ = run_frontiers(g, s, t, ell, check)
    return Estimate(
        r_b, Method.SMM, smm_iterations=ell, elapsed_ns=time.perf_counter_ns() - t0, ell=ell
    )
