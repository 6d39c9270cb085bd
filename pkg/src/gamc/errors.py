"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, DataError exits 2,
NumericError exits 3.
"""


class GamcError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(GamcError):
    """Operands have incompatible shapes."""


class ContractError(GamcError):
    """An API was called outside its contract (wrong tape, missing grad, ...)."""


class DataError(GamcError):
    """A dataset, graph, or checkpoint violates a format invariant."""


class NumericError(GamcError):
    """A computation produced non-finite values."""
