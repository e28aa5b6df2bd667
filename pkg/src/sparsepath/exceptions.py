"""Exception hierarchy shared across the package."""


class SparsePathError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SparsePathError, ValueError):
    """Invalid argument or configuration value."""


class DataError(SparsePathError, ValueError):
    """Invalid, malformed, or unusable input data."""


class ParseError(DataError):
    """Non-numeric cell encountered while reading a CSV file."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class FormatError(DataError):
    """Structurally malformed file (ragged rows, missing columns, ...)."""


class DegenerateDataError(DataError):
    """Data admits no meaningful fit (constant response, zero gradient)."""


class DegenerateCurvatureError(SparsePathError):
    """1-D coordinate subproblem is not strongly convex for the requested penalty."""


class DegenerateFitError(SparsePathError):
    """Exact interpolation: residual is identically zero."""


class EvaluationError(SparsePathError):
    """Loss or gradient evaluation hit a nonfinite linear predictor."""
