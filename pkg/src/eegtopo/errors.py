"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: ParameterError/ConfigError -> 2,
DataError (and subclasses) -> 3, ResourceCapError -> 4.
"""


class EegtopoError(Exception):
    """Base class for all package errors."""


class ParameterError(EegtopoError, ValueError):
    """A caller-supplied parameter is out of its documented range."""


class ConfigError(EegtopoError, ValueError):
    """An experiment config is malformed or references missing files."""


class EmptyResultError(ParameterError):
    """Parameters leave no work to do, e.g. a window longer than its series."""


class DataError(EegtopoError):
    """Input data is structurally invalid (corrupt file, bad shape, NaN)."""


class DegenerateInputError(DataError):
    """Input is technically well-formed but carries no usable information,
    e.g. a constant series where a spread estimate is required."""


class SchemaError(DataError):
    """A feature map or labeled dataset violates its declared schema."""


class ResourceCapError(EegtopoError):
    """A configured resource guard tripped (e.g. simplex-count cap)."""


class InternalInvariantError(EegtopoError):
    """An internal consistency check failed; indicates a bug, not bad input."""
