"""Exception hierarchy for the depfid library.

Every failure mode raised by the library derives from :class:`DepfidError`,
so callers (and the CLI's exit-code policy) can catch one type.
"""


class DepfidError(Exception):
    """Base class for all depfid errors."""


class InsufficientSamples(DepfidError):
    """An operation needs more rows than the input provides."""


class InvalidData(DepfidError):
    """Input contains non-finite entries or violates a type invariant."""


class DegenerateVariance(DepfidError):
    """A variance needed as a denominator is zero or negative."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class DegenerateInput(DepfidError):
    """Input is degenerate for the requested statistic (e.g. constant)."""


class EigenNoConverge(DepfidError):
    """The Jacobi eigensolver did not converge within the sweep budget."""


class NotPositiveDefinite(DepfidError):
    """Cholesky factorization hit a non-positive pivot."""

    def __init__(self, message: str, pivot_index: int | None = None):
        super().__init__(message)
        self.pivot_index = pivot_index


class IndexOutOfRange(DepfidError):
    """A row/column/subspace index exceeds the available dimensions."""


class ShapeMismatch(DepfidError):
    """Two inputs that must share a shape do not."""


class InvalidSubspace(DepfidError):
    """A matrix expected to have orthonormal columns does not."""


class DomainError(DepfidError):
    """A scalar argument lies outside the function's domain."""


class IoError(DepfidError):
    """A file could not be read or written."""


class ParseError(DepfidError):
    """A CSV cell could not be parsed as a number."""

    def __init__(self, row: int, col: int, message: str | None = None):
        super().__init__(message or f"cannot parse cell at row {row}, column {col}")
        self.row = row
        self.col = col


class RaggedRows(DepfidError):
    """A CSV row has a different number of cells than the first row."""

    def __init__(self, row: int, message: str | None = None):
        super().__init__(message or f"row {row} has a different number of columns")
        self.row = row
