"""Pairwise effective resistance queries on undirected, unweighted graphs."""
from .bounds import ErrorBudget, SampleBudget
from .estimators import Estimate, McConfig, Method, amc_query, exact_er, geer, mc, mc2, smm, tp
from .graph import Graph, load_edge_list, read_edge_list, validate
from .rng import WalkStreams
from .spectral import SpectralMeta, dense_eigensystem, estimate_lambda

__version__ = "0.1.0"

__all__ = [
    "ErrorBudget", "Estimate", "Graph", "McConfig", "Method", "SampleBudget", "SpectralMeta",
    "WalkStreams", "amc_query", "dense_eigensystem", "estimate_lambda", "exact_er", "geer",
    "load_edge_list", "mc", "mc2", "read_edge_list", "smm", "tp", "validate",
]
