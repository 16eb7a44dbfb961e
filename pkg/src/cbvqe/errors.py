"""Exception types raised by the analysis pipeline."""


class CBVQEError(Exception):
    """Base class for all package errors."""


class HamiltonianParseError(CBVQEError, ValueError):
    """Malformed Hamiltonian file or term string."""


class DimensionError(CBVQEError, ValueError):
    """Qubit count exceeds the configured cap, or operands disagree in size."""


class NumericalError(CBVQEError, ArithmeticError):
    """Base for failures that are numerical rather than input-related."""


class DegenerateEigenvalueError(NumericalError):
    """The targeted eigenvalue is degenerate, so sensitivities are undefined."""


class IllConditionedError(NumericalError):
    """Overlap matrix is singular or too badly conditioned to trust."""


class ConvergenceError(NumericalError):
    """Iterative eigensolver did not reach the requested residual."""
