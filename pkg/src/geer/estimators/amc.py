"""Adaptive Monte Carlo estimation of the walk-series tail.

Each sample Z_k pairs one walk from s with one walk from t and sums a
weight vector along both. Batches double in size until the empirical
Bernstein radius drops to epsilon / 2 or the batch limit tau is reached;
samples from a rejected batch are discarded.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..bounds import ErrorBudget, psi_from_maxima, sample_budget, top_two
from ..graph import Graph
from ..rng import WalkStreams, as_streams
from .common import Estimate, Method, check_node, query_ell, zeroth_term


@dataclass(frozen=True)
class AmcStats:
    walks_used: int = 0
    batches_used: int = 0
    psi: float = 0.0
    eta_star: int = 0
    half_width: float = 0.0


def sample_z(
    g: Graph,
    s: int,
    t: int,
    weights: np.ndarray,
    ell_f: int,
    count: int,
    key_s,
    key_t,
    first: int = 0,
) -> np.ndarray:
    """Z_k = sum over S_k of w - sum over T_k of w, with w = s_vec/d(s) - t_vec/d(t)."""
    return _kernels.sample_z(
        g.indptr, g.indices, weights, s, t, ell_f, count, key_s, key_t, first
    )


def amc_sparse(
    g: Graph,
    s: int,
    t: int,
    s_support: tuple[np.ndarray, np.ndarray],
    t_support: tuple[np.ndarray, np.ndarray],
    ell_f: int,
    budget: ErrorBudget,
    streams: WalkStreams,
) -> tuple[float, AmcStats]:
    """AMC on vectors given as (indices, values) pairs; indices unique per vector."""
    if ell_f == 0:
        return 0.0, AmcStats()
    ds, dt = int(g.degree[s]), int(g.degree[t])
    (si, sv), (ti, tv) = s_support, t_support
    s1, s2 = top_two(sv)
    t1, t2 = top_two(tv)
    psi_value = psi_from_maxima(s1, s2, t1, t2, ds, dt, ell_f)
    weights = np.zeros(g.n)
    weights[si] = sv / ds
    weights[ti] -= tv / dt
    if s == t and not weights.any():
        return 0.0, AmcStats()

    sb = sample_budget(psi_value, budget)
    log_term = math.log(3.0 / (budget.delta / budget.tau))
    args = (g.indptr, g.indices, weights, s, t, ell_f, sb.eta_0)
    tail = (psi_value, log_term, budget.epsilon / 2, streams.key())
    if streams.deadline_ns is None:
        _, last, mean, _, width, walks = _kernels.amc_batches(*args, 0, budget.tau, *tail)
    else:
        walks = 0
        for batch in range(budget.tau):
            streams.check_deadline()
            stopped, last, mean, _, width, drawn = _kernels.amc_batches(
                *args, batch, batch + 1, *tail
            )
            walks += drawn
            if stopped:
                break
    stats = AmcStats(
        walks_used=int(walks),
        batches_used=int(last) + 1,
        psi=psi_value,
        eta_star=sb.eta_star,
        half_width=width,
    )
    return float(mean), stats


def amc(
    g: Graph,
    s: int,
    t: int,
    s_vec: np.ndarray,
    t_vec: np.ndarray,
    ell_f: int,
    budget: ErrorBudget,
    rng=None,
) -> tuple[float, AmcStats]:
    """Estimate q(s, t) for length-``ell_f`` walks weighted by ``s_vec``/``t_vec``."""
    streams = as_streams(rng)
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    if g.degree[s] == 0 or g.degree[t] == 0:
        raise ValueError("AMC endpoints must not be isolated")
    if ell_f < 0:
        raise ValueError("ell_f must be non-negative")
    s_vec = np.asarray(s_vec, dtype=np.float64)
    t_vec = np.asarray(t_vec, dtype=np.float64)
    if s_vec.shape != (g.n,) or t_vec.shape != (g.n,):
        raise ValueError("s_vec and t_vec must have one entry per node")
    if (s_vec < 0).any() or (t_vec < 0).any():
        raise ValueError("AMC requires non-negative vectors")
    si, ti = np.flatnonzero(s_vec), np.flatnonzero(t_vec)
    return amc_sparse(g, s, t, (si, s_vec[si]), (ti, t_vec[ti]), ell_f, budget, streams)


def amc_query(
    g: Graph, s: int, t: int, budget: ErrorBudget, meta, rng=None
) -> Estimate:
    """epsilon-approximate ER from one-hot vectors and the degree-aware walk length."""
    t0 = time.perf_counter_ns()
    streams = as_streams(rng)
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    ell = query_ell(g, s, t, budget.epsilon, meta)
    if s == t:
        r_f, stats = 0.0, AmcStats()
    else:
        one = np.ones(1)
        r_f, stats = amc_sparse(
            g, s, t, (np.array([s]), one), (np.array([t]), one), ell, budget, streams
        )
    return Estimate(
        value=float(r_f + zeroth_term(g, s, t)),
        method=Method.AMC,
        walks_used=stats.walks_used,
        batches_used=stats.batches_used,
        elapsed_ns=time.perf_counter_ns() - t0,
        seed=streams.seed,
        ell=ell,
    )
