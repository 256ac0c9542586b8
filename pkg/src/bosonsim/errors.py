"""Exception hierarchy shared across the package."""


class BosonSimError(Exception):
    """Base class for all package errors."""


class ParameterError(BosonSimError, ValueError):
    """Invalid parameter value (out of range, wrong sign, malformed)."""


class DimensionError(BosonSimError, ValueError):
    """Mismatched operator/register dimensions."""


class CapacityError(BosonSimError, ValueError):
    """Dense materialization request above the configured limit."""


class DomainError(BosonSimError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConvergenceError(BosonSimError, RuntimeError):
    """Iterative solver failed to converge within its budget."""

    def __init__(self, message, residual=None, trace=None):
        super().__init__(message)
        self.residual = residual
        self.trace = trace


class ConditionViolation(BosonSimError, ValueError):
    """A structural condition check failed; carries the offending indices."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = offending
