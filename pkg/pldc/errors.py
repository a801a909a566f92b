"""Exceptions raised by the pldc library; the CLI maps them to exit codes."""


class PLDCError(Exception):
    """Base class for every error raised by pldc."""


class DimensionMismatchError(PLDCError, ValueError):
    """Input width or array shapes do not agree."""


class DuplicateInputError(PLDCError, ValueError):
    """Two rows share the same x but carry different responses."""


class LabelError(PLDCError, ValueError):
    """Classification labels are outside the allowed set."""


class DataFormatError(PLDCError, ValueError):
    """Malformed CSV or JSON input."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class PlaneLimitError(PLDCError, ValueError):
    """A construction would exceed the configured plane cap."""


class SolverError(PLDCError):
    """The interior point solver could not produce a certified answer."""


class InfeasibleProgramError(SolverError):
    pass


class UnboundedProgramError(SolverError):
    pass


class NumericalFailureError(SolverError):
    pass


class DivergenceError(PLDCError):
    """ADMM produced non-finite iterates."""
