"""Exception types shared across the package.

Every error raised by library code derives from ConflabError so callers can
catch domain failures without masking programming errors.
"""

from __future__ import annotations


class ConflabError(Exception):
    """Base class for all library-level failures."""


class DimensionMismatch(ConflabError):
    """Operands live over different variable counts or vector sizes."""


class DivisionByZeroFunction(ConflabError):
    """Attempted to divide by the zero polynomial or zero rational function."""


class PoleAtPoint(ConflabError):
    """A rational function was evaluated where its denominator vanishes."""


class InvalidSignature(ConflabError):
    """Requested signature (p, q) outside the supported range."""


class DegenerateMetric(ConflabError):
    """Metric determinant is the zero polynomial."""


class DegenerateAtPoint(ConflabError):
    """Metric is degenerate at the requested evaluation point."""


class SignatureMismatch(ConflabError):
    """Declared signature disagrees with the one computed at a point, or two
    models of different signature were compared."""


class DimensionTooSmall(ConflabError):
    """Weyl-based conclusions requested in dimension < 4."""


class NotConformal(ConflabError):
    """A map fails to scale the metric by a single common factor.

    Carries the first offending component pair in ``pair``.
    """

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class InadmissibleExponents(ConflabError):
    """Scaling exponents lie outside the admissible parameter region."""


class ZeroVector(ConflabError):
    """An operation received the zero vector where a direction is required."""


class PoleOnPath(ConflabError):
    """Christoffel denominator vanished during integration.

    ``step`` is the index of the offending integration step.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class NonFinite(ConflabError):
    """Integration state stopped being finite.  ``step`` as in PoleOnPath."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class DerivativeTooSmall(ConflabError):
    """First derivative below threshold: Schwarzian quotient is unreliable."""


class NotHyperbolic(ConflabError):
    """Moebius map has trace^2/det <= 4 within tolerance: no real multiplier
    in ]0,1[."""


class MismatchBetweenMethods(ConflabError):
    """Two independent computations of the same quantity disagree."""


class MetricParseError(ConflabError):
    """Malformed metric description file.  ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
