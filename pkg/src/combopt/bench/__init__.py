"""Benchmark harness: experiment configs, seeded sweeps, result records,
and the table generators that rank methods."""

from .config import ConfigError, ExperimentSpec
from .sweep import run_sweep, load_records, derive_seed
from .evaluate import (
    evaluate_clique_results,
    evaluate_kmedoids_results,
    verify_clique_records,
)

__all__ = [
    "ConfigError",
    "ExperimentSpec",
    "run_sweep",
    "load_records",
    "derive_seed",
    "evaluate_clique_results",
    "evaluate_kmedoids_results",
    "verify_clique_records",
]
