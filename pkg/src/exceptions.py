"""Custom exceptions for the comixture toolkit."""

from typing import List, Optional


class ComixtureError(Exception):
    """Base exception for toolkit errors."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message)
        self.details = details or {}


class DimensionMismatchError(ComixtureError, ValueError):
    """Raised when an array does not have the shape an operator expects."""

    def __init__(self, message: str, expected: tuple = None, received: tuple = None):
        super().__init__(message, {'expected': expected, 'received': received})
        self.expected = expected
        self.received = received


class OperatorConstructionError(ComixtureError, ValueError):
    """Raised when a linear operator cannot be built from the given sizes."""
    pass


class SymmetryError(ComixtureError, ValueError):
    """Raised when a spectrum or frequency set breaks conjugate symmetry."""
    pass


class UnsupportedEvaluationError(ComixtureError):
    """Raised when a function value is requested but not available."""
    pass


class OracleError(ComixtureError, ValueError):
    """Raised when the numeric prox oracle cannot search the requested region."""
    pass


class AssumptionViolation(ComixtureError, ValueError):
    """Raised when a comixture term list breaks the weight/norm assumptions.

    ``violations`` holds the full report, one entry per problem found.
    """

    def __init__(self, message: str, violations: Optional[List] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class WeightSumError(AssumptionViolation):
    """Raised when weights are not positive or do not sum to one."""
    pass


class NormBoundError(AssumptionViolation):
    """Raised when an operator norm exceeds one."""
    pass


class TermDimensionError(AssumptionViolation):
    """Raised when term operators do not share the ambient space."""
    pass


class DuplicateEdgeError(AssumptionViolation):
    """Raised when a graph lists the same undirected edge twice."""
    pass


class SolverConfigurationError(ComixtureError, ValueError):
    """Raised when solver options are invalid."""
    pass


class StepSizeError(SolverConfigurationError):
    """Raised when primal-dual step sizes break the convergence condition."""

    def __init__(self, message: str, product: float = None):
        super().__init__(message, {'product': product})
        self.product = product


class NormalizationError(ComixtureError, ValueError):
    """Raised when the error normalization is undefined (x0 equals the reference)."""
    pass


class ExperimentError(ComixtureError, ValueError):
    """Raised when an experiment cannot be built with the requested scale."""
    pass


class MethodMismatchError(ExperimentError):
    """Raised when a solver is requested for an instance it cannot handle."""
    pass


class ImageFormatError(ComixtureError, ValueError):
    """Raised when an image file is not a supported binary PGM."""
    pass
