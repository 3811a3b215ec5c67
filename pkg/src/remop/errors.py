"""Exception types shared across the package."""

from __future__ import annotations


class RemopError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(RemopError, ValueError):
    """Two windows or grid functions do not share an index range / grid."""


class IndexRangeError(RemopError, ValueError):
    """An index or evaluation point lies outside the represented range."""


class InsufficientDataError(RemopError, ValueError):
    """The stored window is too short for the requested operation."""


class DivergentEnvelopeError(RemopError, ValueError):
    """The declared decay envelope does not make the tail finite."""


class NonSummableError(DivergentEnvelopeError):
    """Weighted tail series diverges under the declared envelope."""


class NonIntegrableError(DivergentEnvelopeError):
    """Weighted tail integral diverges under the declared envelope."""


class EnvelopeDomainError(RemopError, ValueError):
    """A tail bound was requested before the envelope's valid-from point."""


class DomainViolationError(RemopError):
    """An iterate escaped the admissible domain U."""


class QuadraturePrecisionError(RemopError):
    """Adaptive quadrature could not meet the requested tolerance.

    Carries the best-effort value and its error estimate so callers can
    still inspect what was achieved.
    """

    def __init__(self, message: str, value: float, error_bound: float):
        super().__init__(message)
        self.value = value
        self.error_bound = error_bound


class ConfigError(RemopError, ValueError):
    """Experiment configuration is unreadable or invalid.

    ``location`` is a JSON-path style string pointing at the offending field.
    """

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
