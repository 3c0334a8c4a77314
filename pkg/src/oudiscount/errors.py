"""Exception hierarchy.

CLI exit codes hang off the two broad families: ``IngestError`` maps to
exit code 2, ``EstimationError`` to exit code 3 and ``ReportError`` to 4.
Everything else is a programming/contract error and surfaces as the usual
ValueError-style failure.
"""


class Error(Exception):
    """Base class for all package-specific errors."""


class DomainError(Error, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EmptySeriesError(Error, ValueError):
    """An operation that needs observations received none."""


class AlignmentError(Error, ValueError):
    """Two series do not overlap (or overlap too little) after alignment."""


class IngestError(Error):
    """Raw input files could not be loaded or validated."""


class ParseError(IngestError):
    """A CSV row could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class DuplicateDateError(IngestError):
    """The same date occurs more than once in an input file."""


class MissingDatesError(IngestError):
    """Gaps in an input series; carries the missing dates."""

    def __init__(self, message: str, missing: list | None = None):
        super().__init__(message)
        self.missing = missing or []


class OverlapError(IngestError):
    """Input series overlap by less than the required span."""


class EstimationError(Error):
    """Parameter estimation failed."""


class DegenerateSeriesError(EstimationError):
    """A series with (near) zero variance cannot identify noise parameters."""


class NonMeanRevertingError(EstimationError):
    """The implied one-step autoregressive coefficient is outside (0, 1)."""


class FitFailureError(EstimationError):
    """A curve fit had no usable points (e.g. no positive autocorrelations)."""


class IllConditionedError(EstimationError):
    """A calibration equation is numerically degenerate."""


class TooManyFailuresError(EstimationError):
    """More than the tolerated share of Monte Carlo replicates failed."""


class ReportError(Error):
    """A report or curve artifact could not be produced from its inputs."""
