"""Exception types shared across the package."""


class GlmEvidenceError(Exception):
    """Base class for all package errors."""


class ContractViolation(GlmEvidenceError):
    """An argument violates a documented precondition (e.g. shape mismatch)."""


class NumericError(GlmEvidenceError):
    """A computation produced a non-finite intermediate or result."""


class Separation(GlmEvidenceError):
    """The MLE diverges (coefficient norm exceeded the guard radius)."""


class NoConvergence(GlmEvidenceError):
    """Newton iteration exhausted max_iter without meeting the gradient tolerance."""


class SingularHessian(GlmEvidenceError):
    """The negative Hessian could not be factorized as positive definite."""


class DimensionTooLarge(GlmEvidenceError):
    """Deterministic quadrature requested for a model with too many coefficients."""


class BudgetExceeded(GlmEvidenceError):
    """A model scan would enumerate more models than the configured budget."""


class PreconditionViolated(GlmEvidenceError):
    """A numeric-verification case violates the hypothesis of the inequality."""


class ParseError(GlmEvidenceError):
    """A data file could not be parsed; message carries row/column context."""


class ShapeMismatch(GlmEvidenceError):
    """Design and response files have inconsistent row counts."""


class InvalidResponse(GlmEvidenceError):
    """Response values are not admissible for the requested family."""
