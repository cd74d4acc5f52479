"""Walk-length and sample-count formulas.

All logarithms are natural. Ceilings go through :func:`ceil_int`, which
absorbs floating-point noise so that expressions landing exactly on an
integer (e.g. ln(e) = 1) do not round up by one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpectralDegeneracyError


def ceil_int(x: float, rel: float = 1e-9) -> int:
    r = round(x)
    if abs(x - r) <= rel * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


@dataclass(frozen=True)
class ErrorBudget:
    epsilon: float
    delta: float
    tau: int = 5

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.tau < 1:
            raise ValueError("tau must be at least 1")


@dataclass(frozen=True)
class SampleBudget:
    psi: float
    eta_star: int
    eta_0: int
    h: int


def _check_lambda(lam: float) -> None:
    if lam >= 1.0:
        raise SpectralDegeneracyError(f"lambda={lam} >= 1: walk length is unbounded")
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")


def refined_ell(d_s: int, d_t: int, epsilon: float, lam: float) -> int:
    """Degree-aware truncation length guaranteeing |r - r_ell| <= epsilon / 2."""
    _check_lambda(lam)
    if d_s < 1 or d_t < 1:
        raise ValueError("degrees must be at least 1")
    arg = (2.0 / d_s + 2.0 / d_t) / (epsilon * (1.0 - lam))
    if arg <= 0:
        return 0
    return max(0, ceil_int(math.log(arg) / math.log(1.0 / lam) - 1.0))


def peng_ell(epsilon: float, lam: float) -> int:
    """Degree-oblivious truncation length used by TP."""
    _check_lambda(lam)
    arg = 4.0 / (epsilon - epsilon * lam)
    return max(0, ceil_int(math.log(arg) / math.log(1.0 / lam) - 1.0))


def top_two(x: np.ndarray) -> tuple[float, float]:
    """Largest and second-largest entries (the second is 0 for a length-1 vector)."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return 0.0, 0.0
    if x.size == 1:
        return float(x[0]), 0.0
    part = np.partition(x, x.size - 2)[-2:]
    return float(part[1]), float(part[0])


def psi(s_vec, t_vec, d_s: int, d_t: int, ell_f: int) -> float:
    """Range bound for the per-walk AMC variable; |Z_k| <= psi / 2."""
    s_vec = np.asarray(s_vec, dtype=np.float64)
    t_vec = np.asarray(t_vec, dtype=np.float64)
    if (s_vec < 0).any() or (t_vec < 0).any():
        raise ValueError("psi requires non-negative vectors")
    s1, s2 = top_two(s_vec)
    t1, t2 = top_two(t_vec)
    return psi_from_maxima(s1, s2, t1, t2, d_s, d_t, ell_f)


def psi_from_maxima(s1, s2, t1, t2, d_s, d_t, ell_f) -> float:
    odd = 2 * ((ell_f + 1) // 2)
    even = 2 * (ell_f // 2)
    return odd * (s1 / d_s + t1 / d_t) + even * (s2 / d_s + t2 / d_t)


def eta_star(psi_value: float, budget: ErrorBudget) -> int:
    """Hoeffding walk count per endpoint."""
    if psi_value < 0:
        raise ValueError("psi must be non-negative")
    x = 2.0 * psi_value**2 * math.log(2.0 * budget.tau / budget.delta) / budget.epsilon**2
    return ceil_int(x)


def bernstein_half_width(n_z: int, var_hat: float, psi_value: float, delta: float) -> float:
    """Empirical Bernstein confidence radius."""
    log_term = math.log(3.0 / delta)
    return math.sqrt(2.0 * var_hat * log_term / n_z) + 3.0 * psi_value * log_term / n_z


def sample_budget(psi_value: float, budget: ErrorBudget) -> SampleBudget:
    es = eta_star(psi_value, budget)
    eta_0 = max(1, ceil_int(es / 2 ** (budget.tau - 1)))
    return SampleBudget(psi=psi_value, eta_star=es, eta_0=eta_0, h=(2**budget.tau - 1) * eta_0)
