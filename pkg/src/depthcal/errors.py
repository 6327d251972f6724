"""Exception types shared across the package."""


class DepthcalError(Exception):
    """Base class for all errors raised by depthcal."""


class CsvFormatError(DepthcalError, ValueError):
    """Malformed calibration CSV content.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RowConsistencyError(CsvFormatError):
    """A CSV row whose pixel depth does not equal R - r."""


class InsufficientDataError(DepthcalError, ValueError):
    """Too few observations for the requested operation."""


class InsufficientDofError(DepthcalError, ValueError):
    """Not enough observations to leave at least one degree of freedom."""


class RankDeficiencyError(DepthcalError, ValueError):
    """The design matrix does not have full column rank."""


class ObjectNotFoundError(DepthcalError, ValueError):
    """No pixel above the background threshold was found."""


class OutOfViewError(DepthcalError, ValueError):
    """A ground distance closer than the camera's closest sight distance."""


class HorizonError(DepthcalError, ValueError):
    """A pixel depth at or beyond the vanishing point."""


class BlurRangeError(DepthcalError, ValueError):
    """A blur width too large for the requested far-side inversion."""


class ProfileFormatError(DepthcalError, ValueError):
    """A persisted camera profile that violates the document schema."""
