"""Reproducible random streams for walk sampling.

A batch of walks is identified by a 64-bit key hashed from
(master seed, query index, endpoint, batch index); each walk inside the
batch then runs its own counter-based stream keyed by its index (see
``_kernels``). Results depend only on these coordinates, never on thread
count or scheduling.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import QueryTimeout

# endpoint tags used in stream keys
SOURCE = 0
TARGET = 1

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_key(seed: int, *parts: int) -> np.uint64:
    z = _mix(int(seed) + _GOLDEN)
    for p in parts:
        z = _mix(z ^ _mix((int(p) + 1) * _GOLDEN))
    return np.uint64(z)


@dataclass(frozen=True)
class WalkStreams:
    seed: int = 0
    query_index: int = 0
    deadline_ns: int | None = None

    def key(self, *parts: int) -> np.uint64:
        return stream_key(self.seed, self.query_index, *parts)

    def generator(self, *parts: int) -> np.random.Generator:
        """A numpy Generator on the same coordinates, for pure-numpy callers."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.query_index, *parts))
        return np.random.Generator(np.random.PCG64(ss))

    def for_query(self, query_index: int) -> "WalkStreams":
        return WalkStreams(self.seed, query_index, self.deadline_ns)

    def with_timeout(self, timeout_ms: float | None) -> "WalkStreams":
        if timeout_ms is None:
            return WalkStreams(self.seed, self.query_index, None)
        deadline = time.monotonic_ns() + int(timeout_ms * 1e6)
        return WalkStreams(self.seed, self.query_index, deadline)

    def check_deadline(self) -> None:
        if self.deadline_ns is not None and time.monotonic_ns() > self.deadline_ns:
            raise QueryTimeout("query exceeded its time limit")


def as_streams(rng) -> WalkStreams:
    """Accept a WalkStreams, an integer seed, or None (seed 0)."""
    if isinstance(rng, WalkStreams):
        return rng
    if rng is None:
        return WalkStreams()
    if isinstance(rng, (int, np.integer)):
        return WalkStreams(seed=int(rng))
    raise TypeError(f"cannot derive walk streams from {type(rng).__name__}")
