"""Command-line harness: preprocess, gen-queries, groundtruth, query, bench."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import threading
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .bounds import ErrorBudget
from .errors import (
    GeerError,
    GraphFormatError,
    GraphTooLargeError,
    MetaFormatError,
    MetaMismatchError,
    NoReturnError,
    PreconditionError,
    QueryTimeout,
    SpectralDegeneracyError,
)
from .estimators import ExactOracle, McConfig, Method, amc_query, geer, mc, mc2, smm_query, tp
from .estimators.exact import EXACT_CAP
from .estimators.smm import run_frontiers
from ._kernels import warm_up
from .graph import Graph, read_edge_list, validate
from .rng import WalkStreams
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, SpectralMeta, estimate_lambda, load_meta, save_meta

EPS_SWEEP = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5)
BENCH_COLUMNS = (
    "method", "s", "t", "epsilon", "delta", "tau", "seed", "value", "abs_error",
    "walks_used", "smm_iterations", "elapsed_ns", "status",
)
GROUNDTRUTH_COLUMNS = ("s", "t", "r", "source", "tail_bound")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_DEGENERATE = 2
EXIT_UNKNOWN_LABEL = 3
EXIT_PRECONDITION = 4


class UsageError(GeerError):
    pass


# ---------------------------------------------------------------- query files


def read_queries(path) -> list[tuple[int, int]]:
    pairs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) < 2:
                raise GraphFormatError("query rows need two labels", line=lineno)
            try:
                pairs.append((int(fields[0]), int(fields[1])))
            except ValueError:
                raise GraphFormatError(f"bad label in {line!r}", line=lineno) from None
    return pairs


def write_queries(pairs, kind: str, seed: int, sink: TextIO) -> None:
    sink.write(f"# kind={kind} seed={seed} count={len(pairs)}\n")
    for s, t in pairs:
        sink.write(f"{s}\t{t}\n")


def read_groundtruth(path) -> dict[tuple[int, int], float]:
    truth = {}
    with open(path) as fh:
        rows = csv.DictReader((ln for ln in fh if not ln.startswith("#")), delimiter="\t")
        for row in rows:
            truth[(int(row["s"]), int(row["t"]))] = float(row["r"])
    return truth


def random_pairs(g: Graph, count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform unordered pairs with s != t, distinct unless ``count`` exceeds n(n-1)/2."""
    total = g.n * (g.n - 1) // 2
    if total == 0:
        raise UsageError("random pairs need at least two nodes")
    if count > total:
        warnings.warn(
            f"only {total} distinct pairs exist; drawing {count} with replacement", stacklevel=2
        )
        s = rng.integers(0, g.n, size=count)
        t = (s + rng.integers(1, g.n, size=count)) % g.n
        return list(zip(s.tolist(), t.tolist()))
    seen: set[tuple[int, int]] = set()
    out = []
    while len(out) < count:
        s, t = rng.integers(0, g.n, size=2).tolist()
        key = (min(s, t), max(s, t))
        if s == t or key in seen:
            continue
        seen.add(key)
        out.append((s, t))
    return out


def random_edges(g: Graph, count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    lo, hi = g.edges()
    if lo.size == 0:
        raise UsageError("graph has no edges")
    pick = rng.choice(lo.size, size=count, replace=count > lo.size)
    flip = rng.random(count) < 0.5
    s = np.where(flip, hi[pick], lo[pick])
    t = np.where(flip, lo[pick], hi[pick])
    return list(zip(s.tolist(), t.tolist()))


# ---------------------------------------------------------------- estimation


@dataclass(frozen=True)
class QueryParams:
    epsilon: float
    delta: float = 0.01
    tau: int = 5
    gamma: float | None = None
    smm_iterations: int | None = None

    @property
    def budget(self) -> ErrorBudget:
        return ErrorBudget(self.epsilon, self.delta, self.tau)


class Runner:
    """Dispatches a method on one graph, holding the shared oracle and metadata."""

    def __init__(self, g: Graph, meta: SpectralMeta | None, exact_cap: int = EXACT_CAP):
        self.g = g
        self.meta = meta
        self.exact_cap = exact_cap
        self._oracle: ExactOracle | None = None
        self._lock = threading.Lock()
        if g.n and g.degree[0] > 0:
            warm_up(g.indptr, g.indices, g.degree)

    def oracle(self) -> ExactOracle:
        with self._lock:
            if self._oracle is None:
                self._oracle = ExactOracle(self.g, self.exact_cap)
            return self._oracle

    def _need_meta(self, method: Method) -> SpectralMeta:
        if self.meta is None:
            raise PreconditionError(f"{method.value} needs spectral metadata (--meta)")
        return self.meta

    def run(self, method: Method, s: int, t: int, p: QueryParams, streams: WalkStreams):
        g, b = self.g, p.budget
        if method is Method.EXACT:
            return self.oracle().query(s, t)
        if method is Method.MC:
            return mc(g, s, t, b, McConfig(p.gamma), streams)
        if method is Method.MC2:
            return mc2(g, s, t, b, McConfig(p.gamma), streams)
        meta = self._need_meta(method)
        if method is Method.SMM:
            return smm_query(g, s, t, b, meta, check=streams.check_deadline,
                             iterations=p.smm_iterations)
        if method is Method.AMC:
            return amc_query(g, s, t, b, meta, streams)
        if method is Method.GEER:
            return geer(g, s, t, b, meta, streams)
        if method is Method.TP:
            return tp(g, s, t, b, meta, streams)
        raise ValueError(f"unsupported method {method}")


def groundtruth_value(
    g: Graph, s: int, t: int, iters: int, lam: float | None, oracle: ExactOracle | None
) -> tuple[float, str, float]:
    """(r, source, tail bound). The tail bound is 0 for the exact oracle."""
    if oracle is not None:
        return oracle.er(s, t), "exact", 0.0
    if s == t:
        return 0.0, f"smm{iters}", 0.0
    r, _, _ = run_frontiers(g, s, t, iters)
    ds, dt = g.degree[s], g.degree[t]
    bound = lam ** (iters + 1) / (1.0 - lam) * (1.0 / ds + 1.0 / dt) if lam is not None else math.nan
    return r, f"smm{iters}", float(bound)


# ---------------------------------------------------------------- commands


def _load_meta_for(g: Graph, path) -> SpectralMeta | None:
    if path is None:
        return None
    meta = load_meta(path)
    meta.check_graph(g)
    return meta


def _open_out(path) -> TextIO:
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", newline="")


def cmd_preprocess(args) -> int:
    g = read_edge_list(args.graph)
    rep = validate(g)
    if not rep.connected:
        print("error: graph is disconnected", file=sys.stderr)
        return EXIT_DEGENERATE
    if rep.bipartite:
        print("error: graph is bipartite", file=sys.stderr)
        return EXIT_DEGENERATE
    meta = estimate_lambda(g, args.tol, args.max_iter)
    out = args.out or f"{args.graph}.meta.json"
    save_meta(meta, out)
    print(f"lambda={meta.lam:.9f} raw={meta.lam_raw:.9f} iterations={meta.iterations_used} -> {out}",
          file=sys.stderr)
    return EXIT_OK


def cmd_gen_queries(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    g = read_edge_list(args.graph)
    rng = np.random.default_rng(args.seed)
    if args.kind == "edges":
        pairs = random_edges(g, args.count, rng)
    else:
        pairs = random_pairs(g, args.count, rng)
    labelled = [(int(g.labels[s]), int(g.labels[t])) for s, t in pairs]
    out = _open_out(args.out)
    try:
        write_queries(labelled, args.kind, args.seed, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_groundtruth(args) -> int:
    if args.iters < 1:
        raise UsageError("--iters must be at least 1")
    g = read_edge_list(args.graph)
    pairs = [(g.index_of(s), g.index_of(t)) for s, t in read_queries(args.queries)]
    oracle = ExactOracle(g, args.exact_cap) if g.n <= args.exact_cap else None
    lam = None
    if oracle is None:
        meta = _load_meta_for(g, args.meta)
        lam = meta.lam if meta is not None else estimate_lambda(g).lam
    out = _open_out(args.out)
    try:
        w = csv.writer(out, delimiter="\t", lineterminator="\n")
        w.writerow(GROUNDTRUTH_COLUMNS)
        for s, t in pairs:
            r, source, bound = groundtruth_value(g, s, t, args.iters, lam, oracle)
            w.writerow([int(g.labels[s]), int(g.labels[t]), repr(r), source, repr(bound)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_query(args) -> int:
    method = Method.parse(args.method)
    g = read_edge_list(args.graph)
    meta = _load_meta_for(g, args.meta)
    try:
        s, t = g.index_of(args.source), g.index_of(args.target)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_UNKNOWN_LABEL
    params = QueryParams(args.eps, args.delta, args.tau, args.gamma, args.iters)
    streams = WalkStreams(args.seed).with_timeout(args.timeout_ms)
    est = Runner(g, meta, args.exact_cap).run(method, s, t, params, streams)
    record = est.to_dict()
    record["s"], record["t"] = args.source, args.target
    print(json.dumps(record))
    return EXIT_OK


@dataclass(frozen=True)
class BenchTask:
    index: int
    method: Method
    s: int
    t: int
    epsilon: float


def bench_records(
    runner: Runner,
    pairs: Sequence[tuple[int, int]],
    methods: Sequence[Method],
    eps_list: Sequence[float],
    *,
    delta: float,
    tau: int,
    seed: int,
    gamma: float | None = None,
    smm_iterations: int | None = None,
    truth: dict[tuple[int, int], float] | None = None,
    timeout_ms: float | None = None,
    threads: int = 1,
) -> list[dict]:
    """One record per (method, query, epsilon), in that nesting order.

    The query index seeds each query's walk streams, so values do not depend
    on ``threads``.
    """
    g = runner.g
    tasks = [
        BenchTask(qi, m, s, t, eps)
        for m in methods
        for eps in eps_list
        for qi, (s, t) in enumerate(pairs)
    ]

    def one(task: BenchTask) -> dict:
        params = QueryParams(task.epsilon, delta, tau, gamma, smm_iterations)
        streams = WalkStreams(seed, task.index).with_timeout(timeout_ms)
        s_label, t_label = int(g.labels[task.s]), int(g.labels[task.t])
        rec = dict.fromkeys(BENCH_COLUMNS, "")
        rec.update(method=task.method.value, s=s_label, t=t_label, epsilon=task.epsilon,
                   delta=delta, tau=tau, seed=seed)
        t0 = time.perf_counter_ns()
        try:
            est = runner.run(task.method, task.s, task.t, params, streams)
        except QueryTimeout:
            rec.update(status="timeout", elapsed_ns=time.perf_counter_ns() - t0)
            return rec
        except (PreconditionError, SpectralDegeneracyError, GraphTooLargeError, NoReturnError) as exc:
            print(f"{task.method.value} {s_label} {t_label}: {exc}", file=sys.stderr)
            rec.update(status="error", elapsed_ns=time.perf_counter_ns() - t0)
            return rec
        rec.update(value=repr(est.value), walks_used=est.walks_used,
                   smm_iterations=est.smm_iterations, elapsed_ns=est.elapsed_ns, status="ok")
        if truth is not None and (s_label, t_label) in truth:
            rec["abs_error"] = repr(abs(est.value - truth[(s_label, t_label)]))
        return rec

    if threads <= 1:
        return [one(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, tasks))


def summarize(records: Sequence[dict]) -> list[str]:
    groups: dict[tuple[str, float], list[dict]] = {}
    for rec in records:
        groups.setdefault((rec["method"], rec["epsilon"]), []).append(rec)
    lines = []
    for (method, eps), recs in groups.items():
        ok = [r for r in recs if r["status"] == "ok"]
        times = [r["elapsed_ns"] for r in ok]
        errs = [float(r["abs_error"]) for r in ok if r["abs_error"] != ""]
        mean_ms = np.mean(times) / 1e6 if times else math.nan
        mean_err = np.mean(errs) if errs else math.nan
        lines.append(
            f"{method}\teps={eps}\tok={len(ok)}/{len(recs)}\t"
            f"mean_ms={mean_ms:.4f}\tmean_abs_error={mean_err:.3e}"
        )
    return lines


def write_bench(records: Sequence[dict], sink: TextIO) -> None:
    w = csv.DictWriter(sink, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(records)


def cmd_bench(args) -> int:
    methods = [Method.parse(m) for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise UsageError("--methods is empty")
    eps_list = [float(e) for e in args.eps_list.split(",") if e.strip()]
    if not eps_list:
        raise UsageError("--eps-list is empty")
    g = read_edge_list(args.graph)
    meta = _load_meta_for(g, args.meta)
    pairs = [(g.index_of(s), g.index_of(t)) for s, t in read_queries(args.queries)]
    truth = read_groundtruth(args.groundtruth) if args.groundtruth else None
    records = bench_records(
        Runner(g, meta, args.exact_cap), pairs, methods, eps_list,
        delta=args.delta, tau=args.tau, seed=args.seed, gamma=args.gamma, smm_iterations=args.iters, truth=truth,
        timeout_ms=args.timeout_ms, threads=args.threads,
    )
    out = _open_out(args.out)
    try:
        write_bench(records, out)
    finally:
        if out is not sys.stdout:
            out.close()
    for line in summarize(records):
        print(line, file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, meta=False):
        p.add_argument("--graph", required=True, help="edge list, one 'u v' pair per line")
        if meta:
            p.add_argument("--meta", help="spectral metadata JSON from 'preprocess'")
        p.add_argument("--out", help="output path (default: stdout)")

    def accuracy(p):
        p.add_argument("--delta", type=float, default=0.01)
        p.add_argument("--tau", type=int, default=5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--gamma", type=float, default=None,
                       help="MC: upper bound on r(s,t); MC2: lower bound")
        p.add_argument("--timeout-ms", type=float, default=None)
        p.add_argument("--exact-cap", type=int, default=EXACT_CAP)
        p.add_argument("--iters", type=int, default=None,
                       help="fixed SMM iteration count (default: degree-aware length)")

    p = sub.add_parser("preprocess", help="estimate lambda and write the metadata sidecar")
    common(p)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("gen-queries", help="draw a query set")
    common(p)
    p.add_argument("--kind", choices=("random_pairs", "edges"), default="random_pairs")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("groundtruth", help="reference values (exact on small graphs, else SMM)")
    common(p, meta=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--exact-cap", type=int, default=EXACT_CAP,
                   help="use the exact oracle when n is at most this (0 disables)")
    p.set_defaults(func=cmd_groundtruth)

    p = sub.add_parser("query", help="answer one query and print it as JSON")
    common(p, meta=True)
    p.add_argument("--method", required=True, choices=[m.value.lower() for m in Method],
                   type=str.lower)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    accuracy(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="run methods over a query set and write CSV records")
    common(p, meta=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--methods", required=True, help="comma-separated, e.g. amc,geer,tp")
    p.add_argument("--eps-list", default=",".join(str(e) for e in EPS_SWEEP))
    p.add_argument("--groundtruth")
    p.add_argument("--threads", type=int, default=1)
    accuracy(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpectralDegeneracyError, PreconditionError, GraphTooLargeError, NoReturnError) as exc:
        if args.command == "preprocess" and isinstance(exc, SpectralDegeneracyError):
            code = EXIT_DEGENERATE
        elif args.command == "query":
            code = EXIT_PRECONDITION
        else:
            code = EXIT_FAILURE
        print(f"error: {exc}", file=sys.stderr)
        return code
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_UNKNOWN_LABEL if args.command == "query" else EXIT_FAILURE
    except QueryTimeout as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (OSError, GraphFormatError, MetaFormatError, MetaMismatchError, UsageError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
