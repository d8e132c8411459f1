"""
Physical-validity guardrails.

Validates system parameters and cavity frequencies before they reach any
closed-form expression, and decides when a result leaves the regime where
first-order dressing is trustworthy.
"""
import logging
import math
from typing import Iterable, Optional, Tuple

from config.settings import config
from core.errors import NearResonanceError, ValidityError

logger = logging.getLogger(__name__)


def validate_system_params(e0: float, coupling: float) -> None:
    """
    Check the qubit gap and coupling strength.

    Raises ValidityError for E0 <= 0, negative or non-finite coupling, and
    lambda/E0 >= 1. Logs a warning above lambda/E0 = 0.5.
    """
    if not math.isfinite(e0) or e0 <= 0:
        raise ValidityError(f"e0 must be positive and finite, got {e0}", parameter="e0")
    if not math.isfinite(coupling) or coupling < 0:
        raise ValidityError(f"lambda must be non-negative and finite, got {coupling}", parameter="lambda")

    ratio = coupling / e0
    if ratio >= 1:
        raise ValidityError(f"lambda/e0 = {ratio:.4g} is outside the perturbative regime", parameter="lambda")
    if ratio > config.COUPLING_WARN_RATIO:
        logger.warning(f"lambda/e0 = {ratio:.4g} exceeds {config.COUPLING_WARN_RATIO}; perturbative results are unreliable")


def validate_frequency(omega: float, name: str = "omega") -> None:
    """Cavity frequencies must be positive and finite."""
    if not math.isfinite(omega) or omega <= 0:
        raise ValidityError(f"{name} must be positive and finite, got {omega}", parameter=name)


def check_off_resonance(omega: float, e0: float, name: str = "omega",
                        eps: Optional[float] = None) -> None:
    """
    Guard every (omega - E0) denominator.

    Args:
        omega: Cavity frequency
        e0: Qubit transition frequency
        name: Parameter name reported in the error
        eps: Relative proximity threshold (defaults to config.NEAR_RESONANCE_EPS)

    Raises:
        NearResonanceError if |omega - E0| < eps * E0
    """
    eps = config.NEAR_RESONANCE_EPS if eps is None else eps
    if abs(omega - e0) < eps * e0:
        raise NearResonanceError(
            f"{name} = {omega:.10g} is resonant with e0 = {e0:.10g} (|{name} - e0| < {eps:g} * e0)",
            parameter=name,
        )


def check_normalized(norm_squared: float, tol: Optional[float] = None) -> Tuple[bool, str]:
    """
    Check that a state is normalized.

    Returns:
        Tuple of (is_normalized, reason_if_not)
    """
    tol = config.NORMALIZATION_TOL if tol is None else tol
    if not math.isfinite(norm_squared):
        return False, "non_finite_norm"
    if abs(norm_squared - 1.0) > tol:
        return False, f"norm_squared_{norm_squared:.12g}"
    return True, ""


def assess_validity(probabilities: Iterable[float], coefficients: Iterable[float],
                    probability_limit: Optional[float] = None,
                    coefficient_limit: Optional[float] = None) -> Tuple[bool, str]:
    """
    Decide whether a result row needs the validity warning.

    Args:
        probabilities: Excitation probabilities of the row
        coefficients: First-order dressing coefficients involved in the row
        probability_limit: Flag threshold for probabilities (default 0.5)
        coefficient_limit: Flag threshold for |coefficient| (default 0.3)

    Returns:
        Tuple of (warning, reason)
    """
    probability_limit = config.PROBABILITY_WARN if probability_limit is None else probability_limit
    coefficient_limit = config.COEFFICIENT_WARN if coefficient_limit is None else coefficient_limit

    worst_p = max((float(p) for p in probabilities), default=0.0)
    if worst_p > 1.0:
        return True, f"probability_above_one_{worst_p:.4g}"
    if worst_p > probability_limit:
        return True, f"probability_{worst_p:.4g}"

    worst_c = max((abs(float(c)) for c in coefficients), default=0.0)
    if worst_c > coefficient_limit:
        return True, f"coefficient_{worst_c:.4g}"

    return False, ""
