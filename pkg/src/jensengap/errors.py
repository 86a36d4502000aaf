"""Exception types shared across the package."""


class VerifierError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(VerifierError):
    """Array shapes are inconsistent with each other."""


class InvalidValueError(VerifierError):
    """A mass, kernel entry, or weight is non-finite or out of range."""


class HypothesisViolation(VerifierError):
    """A structural hypothesis (weight mass, column constancy) fails."""


class DomainError(VerifierError):
    """A value falls outside the interval on which phi is defined."""


class ShapeError(VerifierError):
    """The convexity shape of f does not match what a check requires."""


class GenerationError(VerifierError):
    """A random generator could not produce an admissible object."""


class InternalConsistencyError(VerifierError):
    """Two mathematically equal evaluation routes disagreed numerically."""
