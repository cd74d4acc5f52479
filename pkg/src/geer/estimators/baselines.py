"""Prior Monte Carlo baselines: MC (escape excursions), MC2 (edge arrival) and TP."""
from __future__ import annotations

import math
import time

from .._kernels import edge_arrivals, endpoint_counts, escape_excursions
from ..bounds import ErrorBudget, ceil_int, peng_ell
from ..errors import NoReturnError, PreconditionError
from ..graph import Graph
from ..rng import SOURCE, TARGET, as_streams
from .common import Estimate, McConfig, Method, check_meta, check_node, zeroth_term

STEP_CAP = 1_000_000
MC2_DEFAULT_GAMMA_MAX_EDGES = 1000
_CHUNK = 1 << 20
_EXCURSION_CHUNK = 1 << 14


def mc_walk_count(d_s: int, epsilon: float, delta: float, gamma: float) -> int:
    return ceil_int(3.0 * gamma * d_s * math.log(1.0 / delta) / epsilon**2)


def mc2_walk_count(epsilon: float, delta: float, gamma: float) -> int:
    return ceil_int(3.0 * math.log(1.0 / delta) / (epsilon**2 * gamma))


def tp_walk_count(ell: int, epsilon: float, delta: float) -> int:
    return ceil_int(40.0 * ell**2 * math.log(8.0 * ell / delta) / epsilon**2)


def mc(g: Graph, s: int, t: int, budget: ErrorBudget, cfg: McConfig = McConfig(), rng=None,
       step_cap: int = STEP_CAP) -> Estimate:
    """eta excursions from s; eta_r of them visit t before returning to s.

    r(s, t) = 1 / (d(s) * P[visit t before returning to s]), estimated as
    eta / (d(s) * eta_r).
    """
    t0 = time.perf_counter_ns()
    streams = as_streams(rng)
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    if s == t:
        raise PreconditionError("MC needs distinct endpoints")
    gamma = 1.0 if cfg.gamma is None else cfg.gamma
    ds = int(g.degree[s])
    eta = mc_walk_count(ds, budget.epsilon, budget.delta, gamma)
    key = streams.key(SOURCE, 0)
    eta_r = 0
    for first in range(0, eta, _EXCURSION_CHUNK):
        streams.check_deadline()
        hits, capped = escape_excursions(
            g.indptr, g.indices, s, t, min(_EXCURSION_CHUNK, eta - first), key, step_cap, first
        )
        if capped:
            raise NoReturnError(f"{capped} excursion(s) exceeded the {step_cap}-step cap")
        eta_r += hits
    if eta_r == 0:
        raise NoReturnError("no excursion reached the target; the gamma assumption looks violated")
    return Estimate(
        value=eta / (ds * eta_r),
        method=Method.MC,
        walks_used=eta,
        elapsed_ns=time.perf_counter_ns() - t0,
        seed=streams.seed,
    )


def mc2_default_gamma(g: Graph) -> float:
    """1/(2m), the universal lower bound for adjacent pairs, on small graphs only."""
    if g.m > MC2_DEFAULT_GAMMA_MAX_EDGES:
        raise PreconditionError(
            f"MC2 needs an explicit gamma on graphs with more than "
            f"{MC2_DEFAULT_GAMMA_MAX_EDGES} edges"
        )
    return 1.0 / (2 * g.m)


def mc2(g: Graph, s: int, t: int, budget: ErrorBudget, cfg: McConfig = McConfig(), rng=None,
        step_cap: int = STEP_CAP) -> Estimate:
    """Fraction of walks from s whose first arrival at t crosses the edge (s, t)."""
    t0 = time.perf_counter_ns()
    streams = as_streams(rng)
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    if s == t or not g.has_edge(s, t):
        raise PreconditionError("MC2 requires (s, t) to be an edge")
    gamma = mc2_default_gamma(g) if cfg.gamma is None else cfg.gamma
    count = mc2_walk_count(budget.epsilon, budget.delta, gamma)
    key = streams.key(SOURCE, 0)
    via = 0
    for first in range(0, count, _EXCURSION_CHUNK):
        streams.check_deadline()
        hits, capped = edge_arrivals(
            g.indptr, g.indices, s, t, min(_EXCURSION_CHUNK, count - first), key, step_cap, first
        )
        if capped:
            raise NoReturnError(f"{capped} walk(s) exceeded the {step_cap}-step cap")
        via += hits
    return Estimate(
        value=via / count,
        method=Method.MC2,
        walks_used=count,
        elapsed_ns=time.perf_counter_ns() - t0,
        seed=streams.seed,
    )


def _endpoint_hits(g: Graph, origin: int, length: int, count: int, s: int, t: int, key,
                   streams) -> tuple[int, int]:
    """How many of ``count`` length-``length`` walks from origin end at s and at t."""
    at_s = at_t = 0
    for first in range(0, count, _CHUNK):
        streams.check_deadline()
        k = min(_CHUNK, count - first)
        hs, ht = endpoint_counts(g.indptr, g.indices, origin, length, k, key, s, t, first)
        at_s += hs
        at_t += ht
    return at_s, at_t


def tp(g: Graph, s: int, t: int, budget: ErrorBudget, meta, rng=None) -> Estimate:
    """Truncated series with every p_i term estimated from length-i walk endpoints."""
    t0 = time.perf_counter_ns()
    streams = as_streams(rng)
    s, t = check_node(g, s, "s"), check_node(g, t, "t")
    check_meta(g, meta)
    ell = peng_ell(budget.epsilon, meta.lam)
    ds, dt = int(g.degree[s]), int(g.degree[t])
    value = zeroth_term(g, s, t)
    if ell == 0:
        return Estimate(value, Method.TP, elapsed_ns=time.perf_counter_ns() - t0,
                        seed=streams.seed, ell=0)
    per_length = tp_walk_count(ell, budget.epsilon, budget.delta)
    walks = 0
    for i in range(1, ell + 1):
        ss, st = _endpoint_hits(g, s, i, per_length, s, t, streams.key(SOURCE, i), streams)
        walks += per_length
        if s == t:
            ts, tt = ss, st
        else:
            ts, tt = _endpoint_hits(g, t, i, per_length, s, t, streams.key(TARGET, i), streams)
            walks += per_length
        value += (ss / per_length) / ds + (tt / per_length) / dt
        value -= (st / per_length) / dt + (ts / per_length) / ds
    return Estimate(
        value=float(value),
        method=Method.TP,
        walks_used=walks,
        elapsed_ns=time.perf_counter_ns() - t0,
        seed=streams.seed,
        ell=ell,
    )
