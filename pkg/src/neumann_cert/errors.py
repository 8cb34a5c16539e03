"""Exception types shared across the toolkit."""


class NeumannCertError(Exception):
    """Base class for all toolkit errors."""


class DomainError(NeumannCertError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RepresentationError(NeumannCertError, ValueError):
    """A potential representation violates its structural invariants."""


class IntegrationError(NeumannCertError, RuntimeError):
    """The adaptive integrator failed (step-size underflow or non-finite state)."""


class ExtractionError(NeumannCertError, RuntimeError):
    """Zero-profile extraction found a non-interlaced or incomplete crossing set."""


class ConstructionError(NeumannCertError, RuntimeError):
    """A potential family constructor could not satisfy its own output checks."""


class PreconditionError(NeumannCertError, ValueError):
    """A documented precondition of an operation does not hold."""
