"""
Exception hierarchy shared by the solvers, the experiment runner and the CLI.
"""


class ContourScatterError(Exception):
    """Base class for all package errors."""


class DomainError(ContourScatterError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigurationError(ContourScatterError, ValueError):
    """Inconsistent grid, problem or solver configuration."""


class ShapeMismatchError(ConfigurationError):
    """Field shape does not match the grid it is used with."""


class ChannelClosedError(DomainError):
    """Ionization channel requested below its energy threshold."""


class NumericalError(ContourScatterError, RuntimeError):
    """Numerical failure; the CLI maps it to exit code 3."""


class SingularSmootherError(NumericalError):
    """Zero entry on the operator diagonal used by a point smoother."""


class SingularSystemError(NumericalError):
    """Exactly singular matrix in a direct solve."""


class ProblemTooLargeError(NumericalError):
    """Direct solve refused because the system exceeds the size limit."""


class RotationAngleTooLargeError(NumericalError):
    """Far-field integrand factor overflows on the rotated contour."""


class ConvergenceFailure(NumericalError):
    """Iteration that must converge (e.g. eigen-iteration) did not."""
