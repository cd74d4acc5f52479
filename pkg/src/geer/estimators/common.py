from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

import numpy as np

from ..bounds import refined_ell
from ..errors import SpectralDegeneracyError
from ..graph import Graph
from ..spectral import LAMBDA_CAP, SpectralMeta


class Method(str, enum.Enum):
    EXACT = "EXACT"
    SMM = "SMM"
    AMC = "AMC"
    GEER = "GEER"
    MC = "MC"
    MC2 = "MC2"
    TP = "TP"

    @classmethod
    def parse(cls, name: str) -> "Method":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown method {name!r}") from None


@dataclass(frozen=True)
class Estimate:
    value: float
    method: Method
    walks_used: int = 0
    smm_iterations: int = 0
    batches_used: int = 0
    elapsed_ns: int = 0
    seed: int = 0
    ell: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d


@dataclass
class WalkAccumulator:
    """Running sum and sum of squares of per-walk samples for one batch."""

    sum_z: float = 0.0
    sum_z2: float = 0.0
    count: int = 0

    def add(self, z: np.ndarray) -> None:
        self.sum_z += float(z.sum())
        self.sum_z2 += float(np.dot(z, z))
        self.count += int(z.size)

    def merge(self, other: "WalkAccumulator") -> "WalkAccumulator":
        return WalkAccumulator(
            self.sum_z + other.sum_z, self.sum_z2 + other.sum_z2, self.count + other.count
        )

    @property
    def mean(self) -> float:
        return self.sum_z / self.count if self.count else 0.0

    @property
    def variance(self) -> float:
        """Biased empirical variance, clamped at zero against rounding."""
        if not self.count:
            return 0.0
        mu = self.mean
        return max(0.0, self.sum_z2 / self.count - mu * mu)


@dataclass(frozen=True)
class McConfig:
    """Magnitude assumption on r(s, t).

    MC treats ``gamma`` as an upper bound on r(s, t); MC2 treats it as a
    lower bound. ``None`` lets each method pick its default.
    """

    gamma: float | None = None

    def __post_init__(self):
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")


def check_node(g: Graph, v: int, name: str) -> int:
    v = int(v)
    if not 0 <= v < g.n:
        raise IndexError(f"{name}={v} out of range for a graph with {g.n} nodes")
    return v


def check_meta(g: Graph, meta: SpectralMeta) -> None:
    meta.check_graph(g)
    if not meta.connected:
        raise SpectralDegeneracyError("graph is disconnected")
    if meta.bipartite:
        raise SpectralDegeneracyError("graph is bipartite")
    if meta.lam >= LAMBDA_CAP:
        raise SpectralDegeneracyError("spectral gap too small: lambda reached its cap")


def query_ell(g: Graph, s: int, t: int, epsilon: float, meta: SpectralMeta) -> int:
    check_meta(g, meta)
    return refined_ell(int(g.degree[s]), int(g.degree[t]), epsilon, meta.lam)


def zeroth_term(g: Graph, s: int, t: int) -> float:
    """i = 0 summand of the walk series: 1/d(s) + 1/d(t) when s != t."""
    if s == t:
        return 0.0
    return 1.0 / g.degree[s] + 1.0 / g.degree[t]
