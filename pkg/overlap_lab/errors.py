"""
Error Definitions

This module defines the exception hierarchy shared by the whole package:
- Parameter errors (bad arguments, bad configuration, empty inputs)
- Numerical errors (non-convergence, degenerate spectra, singular factors)
- Mapping from exceptions to CLI exit codes
"""

from typing import Optional


# Exit codes used by the command-line entry point
EXIT_PASS = 0
EXIT_STATISTICAL_FAILURE = 1
EXIT_USAGE_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


class OverlapLabError(Exception):
    """Base class for all errors raised by overlap_lab."""


class ParameterError(OverlapLabError, ValueError):
    """Argument out of range, dimension mismatch or non-finite input."""


class EmptyInputError(ParameterError):
    """Empty sample, empty radius band or empty histogram window."""


class NonPositiveArgument(ParameterError):
    """A strictly positive argument was required."""


class ConfigError(ParameterError):
    """Invalid experiment configuration (unknown key, bad value)."""


class NumericalError(OverlapLabError, ArithmeticError):
    """Base class for failures of the numerical kernels."""


class NonConvergence(NumericalError):
    """Shifted QR iteration did not deflate within the sweep budget."""

    def __init__(self, message: str, sweeps: Optional[int] = None):
        super().__init__(message)
        self.sweeps = sweeps


class DegenerateSpectrum(NumericalError):
    """Two eigenvalues are closer than the degeneracy threshold."""

    def __init__(self, message: str, gap: Optional[float] = None):
        super().__init__(message)
        self.gap = gap


class SingularMatrix(NumericalError):
    """LU pivot below threshold."""


class NotPositiveDefinite(NumericalError):
    """Cholesky pivot below threshold."""


class PoleSingularity(NumericalError):
    """Inverse stereographic projection requested at the north pole."""


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to the CLI exit code.

    Args:
        exc: Raised exception

    Returns:
        2 for usage/configuration errors, 3 for numerical errors
    """
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL_ERROR
    if isinstance(exc, (ParameterError, ValueError, OSError)):
        return EXIT_USAGE_ERROR
    return EXIT_NUMERICAL_ERROR
