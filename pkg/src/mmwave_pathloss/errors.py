"""Exception hierarchy.

Every error raised on bad input derives from :class:`PathLossError`, which is
itself a ``ValueError`` so callers that only care about "bad value" can catch
the builtin.
"""


class PathLossError(ValueError):
    pass


class DomainError(PathLossError):
    """Input outside the validity domain (d < 1 m, f < 1 GHz, bad spec...)."""


class DegenerateGeometryError(PathLossError):
    """All samples sit at the 1 m anchor, so no slope can be estimated."""


class SingularDesignError(PathLossError):
    """The regression design matrix is rank deficient."""


class UnstableParameterError(PathLossError):
    """A ratio-defined parameter is undefined because its denominator vanishes."""


class NoSolutionError(PathLossError):
    """A model cannot be inverted (non-increasing in distance)."""


class BelowAnchorError(PathLossError):
    """Requested path loss is below the model value at 1 m."""


class EmptyReportError(PathLossError):
    """No requested model could be fitted to the data."""


class SchemaError(PathLossError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"missing required column {column!r}")


class RowError(PathLossError):
    """Base for errors tied to a line of an input file."""

    def __init__(self, row, message, column=None):
        self.row = row
        self.column = column
        where = f"row {row}" if column is None else f"row {row}, column {column!r}"
        super().__init__(f"{where}: {message}")


class ParseError(RowError):
    pass


class ValidationError(RowError):
    pass
