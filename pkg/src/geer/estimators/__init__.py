"""Effective resistance estimators: exact oracle, SMM, AMC, GEER and the MC/MC2/TP baselines."""
from .amc import AmcStats, amc, amc_query, amc_sparse, sample_z
from .baselines import mc, mc2, tp, tp_walk_count
from .common import Estimate, McConfig, Method, WalkAccumulator
from .exact import ExactOracle, exact_er, laplacian_pinv
from .geer import geer
from .smm import smm, smm_query

__all__ = [
    "AmcStats", "Estimate", "ExactOracle", "McConfig", "Method", "WalkAccumulator",
    "amc", "amc_query", "exact_er", "geer", "laplacian_pinv", "mc", "mc2",
    "amc_sparse", "sample_z", "smm", "smm_query", "tp", "tp_walk_count",
]
