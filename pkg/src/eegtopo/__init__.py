"""Topological feature pipeline for band-filtered time series.

Signal ingest and band decomposition, delay embedding, Vietoris-Rips
persistent homology (H0..H2), persistence landscapes, classical nonlinear
descriptors, small from-scratch classifiers, and an experiment runner.
"""

from .errors import (
    ConfigError,
    DataError,
    DegenerateInputError,
    ParameterError,
    ResourceCapError,
    SchemaError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateInputError",
    "ParameterError",
    "ResourceCapError",
    "SchemaError",
    "__version__",
]
