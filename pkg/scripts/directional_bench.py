#!/usr/bin/env python3
"""Median per-query time of GEER, AMC, SMM and TP on a large sparse random graph."""
import argparse
import statistics
import time

import numpy as np

from geer import _kernels
from geer.bounds import ErrorBudget, peng_ell, refined_ell
from geer.errors import QueryTimeout
from geer.estimators import amc_query, geer, smm_query, tp
from geer.generators import planted_partition_graph
from geer.rng import WalkStreams
from geer.spectral import estimate_lambda


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        best = min(best, time.perf_counter_ns() - t0)
    return best / 1e6


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--d-in", type=float, default=18.0)
    ap.add_argument("--d-out", type=float, default=2.0)
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--delta", type=float, default=0.01)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--tp-queries", type=int, default=2)
    ap.add_argument("--tp-timeout-ms", type=float, default=30_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    g = planted_partition_graph(args.nodes, 2, args.d_in, args.d_out, seed=args.seed)
    t0 = time.perf_counter()
    meta = estimate_lambda(g)
    print(f"n={g.n} m={g.m} lambda={meta.lam_raw:.5f} ({meta.iterations_used} iterations, "
          f"{time.perf_counter() - t0:.2f}s)")
    _kernels.warm_up(g.indptr, g.indices, g.degree)

    budget = ErrorBudget(args.eps, args.delta)
    rng = np.random.default_rng(args.seed)
    pairs = [tuple(int(v) for v in rng.choice(g.n, 2, replace=False)) for _ in range(args.queries)]
    ells = [refined_ell(int(g.degree[s]), int(g.degree[t]), args.eps, meta.lam) for s, t in pairs]
    print(f"refined ell {min(ells)}..{max(ells)}, peng ell {peng_ell(args.eps, meta.lam)}")

    methods = {
        "GEER": lambda s, t, i: geer(g, s, t, budget, meta, WalkStreams(0, i)),
        "AMC": lambda s, t, i: amc_query(g, s, t, budget, meta, WalkStreams(0, i)),
        "SMM": lambda s, t, i: smm_query(g, s, t, budget, meta),
    }
    for name, fn in methods.items():
        times = [best_of(lambda: fn(s, t, i), args.repeats) for i, (s, t) in enumerate(pairs)]
        print(f"{name:<5} median {statistics.median(times):10.3f} ms")

    times, cut = [], 0
    for i, (s, t) in enumerate(pairs[: args.tp_queries]):
        t0 = time.perf_counter_ns()
        try:
            tp(g, s, t, budget, meta, WalkStreams(0, i).with_timeout(args.tp_timeout_ms))
        except QueryTimeout:
            cut += 1
        times.append((time.perf_counter_ns() - t0) / 1e6)
    bound = ">=" if cut else ""
    print(f"TP    median {bound}{statistics.median(times):10.1f} ms ({cut} cut off)")


if __name__ == "__main__":
    main()
