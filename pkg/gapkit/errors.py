"""Exception hierarchy for gapkit.

Every error raised on purpose by the library derives from ``GapkitError`` so
callers (and the CLI) can tell library failures from programming errors.
"""

from typing import Optional


class GapkitError(ValueError):
    """Base class for all gapkit errors."""


class SeparationError(GapkitError):
    """Raised when a set is not separated or has too few points."""


class TruncationError(GapkitError):
    """Raised when an operation needs points beyond what a set can supply."""


class PerturbationError(GapkitError):
    """Raised when perturbation parameters break the interlacing regime."""


class DensityError(GapkitError):
    """Raised by the density estimators."""


class GapError(GapkitError):
    """Raised by the spectral-gap machinery."""


class TransportError(GapkitError):
    """Raised by the measure transport engine."""


class ReportError(GapkitError):
    """Raised when a report cannot be written."""


class SetSpecError(GapkitError):
    """Raised when a set DSL string cannot be parsed.

    Attributes:
        message: The message without the position suffix
        position: Character offset in the input where parsing failed
        expected: Human readable description of what was expected there
    """

    def __init__(self, message: str, position: int = 0, expected: Optional[str] = None):
        self.message = message
        self.position = position
        self.expected = expected
        detail = f" at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(f"{message}{detail}")
