"""
Exception hierarchy shared by the physics services and the command line.

Each error maps to a process exit status; errors that stem from a specific
input carry its name in ``parameter``.
"""
from typing import Optional

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONVERGENCE = 4


class DleError(Exception):
    """Base class for simulator errors."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter


class ConfigError(DleError):
    """Unparseable or inconsistent run configuration."""
    exit_code = EXIT_CONFIG


class ValidityError(DleError):
    """Physical input outside the allowed domain (E0 <= 0, negative coupling, ...)."""
    exit_code = EXIT_NUMERICAL


class NearResonanceError(DleError):
    """A cavity frequency sits on the qubit transition where (omega - E0) denominators blow up."""
    exit_code = EXIT_NUMERICAL


class AssignmentFailedError(DleError):
    """No eigenvector overlaps the requested bare label by more than 1/sqrt(2)."""
    exit_code = EXIT_NUMERICAL


class CutoffLeakageError(DleError):
    """Population reached the top Fock level during time evolution."""
    exit_code = EXIT_NUMERICAL


class NotConvergedError(DleError):
    """An observable did not settle within the scanned cutoffs."""
    exit_code = EXIT_CONVERGENCE


class CutoffUnconvergedError(NotConvergedError):
    """Amplitudes changed by more than the tolerance between cutoff N and N+5."""


class StepSizeUnderflowError(NotConvergedError):
    """The adaptive integrator could not find a step size."""


class EigensolverError(NotConvergedError):
    """The dense eigensolver failed to converge."""


class DimensionMismatchError(ValueError):
    """Operands built for different Fock cutoffs."""


class InvalidQubitIndexError(ValueError):
    """Qubit index outside {1, 2}."""


def exit_code_for(error: BaseException) -> int:
    """Exit status for an exception raised while executing a command."""
    if isinstance(error, DleError):
        return error.exit_code
    if isinstance(error, (DimensionMismatchError, InvalidQubitIndexError)):
        return EXIT_CONFIG
    return 1
