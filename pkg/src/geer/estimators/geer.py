"""Greedy hybrid: deterministic iterations near the endpoints, sampling for the tail."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .._kernels import geer_iterations
from ..bounds import ErrorBudget, psi_from_maxima, sample_budget, top_two
from ..graph import Graph
from ..rng import as_streams
from .amc import amc_sparse
from .common import Estimate, Method, check_node, query_ell
from .smm import Frontier


@dataclass(frozen=True)
class SwitchState:
    volume: int
    budget_h: int


def switch_state(
    g: Graph, f_s: Frontier, f_t: Frontier, remaining: int, budget: ErrorBudget
) -> SwitchState:
    """Frontier volume against h(remaining) for the current iterates."""
    s1, s2 = top_two(f_s.incoming(g))
    t1, t2 = top_two(f_t.incoming(g))
    ds, dt = g.degree[f_s.origin], g.degree[f_t.origin]
    psi_value = psi_from_maxima(s1, s2, t1, t2, ds, dt, remaining)
    return SwitchState(f_s.volume(g) + f_t.volume(g), sample_budget(psi_value, budget).h)


def geer(g: Graph, s: int, t: int, budget: ErrorBudget, meta, rng=None) -> Estimate:
    """Iterate the transition product while it is cheaper than the remaining walk budget.

    Before each iteration the frontier volume of both vectors is compared
    with h(ell - ell_b), recomputed from the current vectors; once the
    volume is larger (or ell_b reaches ell) the rest of the series is
    sampled by AMC seeded with the current walk-probability vectors.
    """
    t0 = time.perf_counter_ns()
    streams = as_streams(rng)
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    ell = query_ell(g, s, t, budget.epsilon, meta)
    if s == t:
        return Estimate(0.0, Method.GEER, elapsed_ns=time.perf_counter_ns() - t0,
                        seed=streams.seed, ell=ell)

    r_b, ell_b, idx_s, val_s, idx_t, val_t = geer_iterations(
        g.indptr, g.indices, g.degree, s, t, ell, budget.tau,
        math.log(2.0 * budget.tau / budget.delta), budget.epsilon, np.zeros(g.n),
    )
    f_s, f_t = Frontier(s, idx_s, val_s), Frontier(t, idx_t, val_t)

    r_f, stats = amc_sparse(
        g, s, t, (f_s.idx, f_s.incoming(g)), (f_t.idx, f_t.incoming(g)),
        ell - ell_b, budget, streams,
    )
    return Estimate(
        value=float(r_b + r_f),
        method=Method.GEER,
        walks_used=stats.walks_used,
        smm_iterations=ell_b,
        batches_used=stats.batches_used,
        elapsed_ns=time.perf_counter_ns() - t0,
        seed=streams.seed,
        ell=ell,
    )
