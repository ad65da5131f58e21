"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ParseError -> 1, ModelError -> 2,
GeoError -> 3.
"""


class PhylomstError(Exception):
    """Base class for all package errors."""


class ParseError(PhylomstError):
    """Malformed or inconsistent input files."""


class ModelError(PhylomstError):
    """Invalid model parameters, symbols, or sequence shapes."""


class GeoError(PhylomstError):
    """Structural or numerical problems with the location model:
    disconnected/bipartite graphs, epsilon out of range, bound violations."""
