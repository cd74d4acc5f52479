"""Spectral preprocessing: lambda = max(|lambda_2|, |lambda_n|) of the walk matrix.

The walk matrix P = D^-1 A is similar to N = D^-1/2 A D^-1/2, whose top
eigenvector u1(v) = sqrt(d(v) / 2m) is known in closed form. Deflating u1 and
running power iteration on the remainder gives the largest remaining
eigenvalue magnitude, which is all the walk-length bound needs.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import TextIO

import numpy as np

from .errors import (
    GraphTooLargeError,
    MetaFormatError,
    MetaMismatchError,
    NonConvergenceError,
    SpectralDegeneracyError,
)
from .graph import Graph, stationary, validate

FORMAT_VERSION = 1
LAMBDA_MARGIN = 1e-3
LAMBDA_CAP = 1.0 - 1e-6
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 100_000
DENSE_CAP = 500


@dataclass(frozen=True)
class SpectralMeta:
    lam: float
    lam_raw: float
    iterations_used: int
    tolerance: float
    connected: bool
    bipartite: bool
    n: int
    m: int

    def check_graph(self, g: Graph) -> None:
        if (self.n, self.m) != (g.n, g.m):
            raise MetaMismatchError(
                f"metadata describes n={self.n}, m={self.m} but graph has n={g.n}, m={g.m}"
            )


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of P in descending algebraic order; ``vectors[:, k]`` is f_k."""

    values: np.ndarray
    vectors: np.ndarray
    pi: np.ndarray

    @property
    def lam(self) -> float:
        return float(max(abs(self.values[1]), abs(self.values[-1])))

    def walk_matrix_power(self, i: int) -> np.ndarray:
        """P^i(u, v) = sum_k f_k(u) f_k(v) pi(v) lambda_k^i."""
        return (self.vectors * self.values**i) @ self.vectors.T * self.pi[None, :]


def require_ergodic(g: Graph) -> None:
    rep = validate(g)
    if not rep.connected:
        raise SpectralDegeneracyError("graph is disconnected")
    if rep.bipartite:
        raise SpectralDegeneracyError("graph is bipartite")


def principal_vector(g: Graph) -> np.ndarray:
    return np.sqrt(g.degree / (2.0 * g.m))


def deflated_operator(g: Graph):
    """x -> (N - u1 u1^T) x as a closure."""
    u1 = principal_vector(g)
    scale = 1.0 / np.sqrt(g.degree)
    A = g.adjacency

    def apply(x: np.ndarray) -> np.ndarray:
        y = scale * (A @ (scale * x))
        return y - u1 * (u1 @ y)

    return apply


def estimate_lambda(
    g: Graph,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    margin: float = LAMBDA_MARGIN,
    cap: float = LAMBDA_CAP,
    seed: int = 0,
) -> SpectralMeta:
    """Power iteration on the deflated normalized adjacency.

    The iterate norm ||M x_k|| rises monotonically to the dominant magnitude.
    Stopping uses the step size together with an extrapolated remaining
    error (geometric tail of successive steps), so slow convergence does not
    end the iteration early.
    """
    require_ergodic(g)
    apply = deflated_operator(g)
    u1 = principal_vector(g)
    x = np.random.default_rng(seed).standard_normal(g.n)
    x -= u1 * (u1 @ x)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise SpectralDegeneracyError("graph too small to have a second eigenvalue")
    x /= norm
    est, prev_step = 0.0, math.inf
    for it in range(1, max_iter + 1):
        y = apply(x)
        y -= u1 * (u1 @ y)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            est = 0.0
            break
        step = abs(new - est)
        est = new
        x = y / new
        if it >= 2 and step <= tol * est:
            rho = step / prev_step if prev_step > 0 else 0.0
            tail = step * rho / (1.0 - rho) if rho < 1.0 else math.inf
            if tail <= tol * est:
                break
        prev_step = step
    else:
        raise NonConvergenceError(
            f"power iteration did not converge in {max_iter} iterations",
            estimate=est,
            vector=x,
            iterations=max_iter,
        )
    lam = min(est * (1.0 + margin), cap)
    return SpectralMeta(
        lam=lam,
        lam_raw=est,
        iterations_used=it,
        tolerance=tol,
        connected=True,
        bipartite=False,
        n=g.n,
        m=g.m,
    )


def dense_eigensystem(g: Graph, cap: int = DENSE_CAP) -> EigenSystem:
    """Full spectrum of P with pi-orthonormal eigenvectors and f_1 = 1."""
    if g.n > cap:
        raise GraphTooLargeError(f"dense eigensystem limited to {cap} nodes, graph has {g.n}")
    if not validate(g).connected:
        raise SpectralDegeneracyError("graph is disconnected")
    scale = 1.0 / np.sqrt(g.degree)
    N = scale[:, None] * g.adjacency.toarray() * scale[None, :]
    vals, w = np.linalg.eigh(N)
    vals, w = vals[::-1], w[:, ::-1]
    f = scale[:, None] * w * math.sqrt(2.0 * g.m)
    if f[0, 0] < 0:
        f[:, 0] = -f[:, 0]
    return EigenSystem(values=vals, vectors=f, pi=stationary(g))


# ----------------------------------------------------------------------------
# sidecar I/O

_KEYS = ("lambda", "lambda_raw", "tolerance", "iterations_used", "connected", "bipartite", "n", "m")


def meta_to_dict(meta: SpectralMeta) -> dict:
    d = asdict(meta)
    return {
        "lambda": d["lam"],
        "lambda_raw": d["lam_raw"],
        "tolerance": d["tolerance"],
        "iterations_used": d["iterations_used"],
        "connected": d["connected"],
        "bipartite": d["bipartite"],
        "n": d["n"],
        "m": d["m"],
        "format_version": FORMAT_VERSION,
    }


def write_meta(meta: SpectralMeta, sink: TextIO) -> None:
    json.dump(meta_to_dict(meta), sink, indent=2)
    sink.write("\n")


def read_meta(source: TextIO) -> SpectralMeta:
    try:
        doc = json.load(source)
    except json.JSONDecodeError as exc:
        raise MetaFormatError(f"metadata is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MetaFormatError("metadata must be a JSON object")
    missing = [k for k in _KEYS if k not in doc]
    if missing:
        raise MetaFormatError(f"metadata missing field(s): {', '.join(missing)}")
    if doc.get("format_version", FORMAT_VERSION) != FORMAT_VERSION:
        raise MetaFormatError(f"unsupported format_version {doc['format_version']}")
    try:
        return SpectralMeta(
            lam=float(doc["lambda"]),
            lam_raw=float(doc["lambda_raw"]),
            iterations_used=int(doc["iterations_used"]),
            tolerance=float(doc["tolerance"]),
            connected=bool(doc["connected"]),
            bipartite=bool(doc["bipartite"]),
            n=int(doc["n"]),
            m=int(doc["m"]),
        )
    except (TypeError, ValueError) as exc:
        raise MetaFormatError(f"bad field type in metadata: {exc}") from None


def save_meta(meta: SpectralMeta, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_meta(meta, fh)


def load_meta(path) -> SpectralMeta:
    with open(path, encoding="utf-8") as fh:
        return read_meta(fh)
