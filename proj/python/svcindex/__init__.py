"""Multilevel service index with pluggable key selection."""

from ._core import (
    ConfigError,
    DuplicateServiceError,
    Error,
    Index,
    InvalidServiceError,
    ParseError,
    bench_add,
    bench_retrieve,
    expected_search_cost,
    sample_parameters,
    theoretical_probabilities,
)

MODES = ("primary", "partial", "full")
STRATEGIES = ("original", "min-count", "max-count", "random", "designated", "least-used")

__all__ = [
    "ConfigError",
    "DuplicateServiceError",
    "Error",
    "Index",
    "InvalidServiceError",
    "MODES",
    "ParseError",
    "STRATEGIES",
    "bench_add",
    "bench_retrieve",
    "expected_search_cost",
    "sample_parameters",
    "theoretical_probabilities",
]
