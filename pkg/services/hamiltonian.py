"""
Hamiltonian assembly for two qubits coupled to one cavity mode (hbar = 1).

    H       = H0 + V_total
    H0      = E0 * sum_j (1 + sigma3_j)/2 + omega * a^dag a
    V_total = lambda * sum_j (sigma+_j + sigma-_j)(a + a^dag) = V_rwa + V_counter
    drive   = i * (omega_dot / 4 omega) * (a^2 - a^dag^2)
"""
import logging
from functools import lru_cache

import numpy as np

from core.guardrails import validate_frequency
from models.physics import SystemParams
from services.hilbert import OperatorMatrix, build_operator, dimension

logger = logging.getLogger(__name__)

INTERACTION_VARIANTS = ("total", "rwa", "counter")


class HamiltonianService:
    """Builds the stationary and nonstationary pieces of the cavity Hamiltonian."""

    @staticmethod
    def h0(params: SystemParams, omega: float, cutoff: int) -> OperatorMatrix:
        """Diagonal E0 (q1 + q2) + omega n."""
        validate_frequency(omega)
        return OperatorMatrix(cutoff, np.diag(_h0_diagonal(params.e0, omega, cutoff)), hermitian=True)

    @staticmethod
    def interaction(params: SystemParams, cutoff: int, variant: str = "total") -> OperatorMatrix:
        """
        Qubit-photon coupling.

        Args:
            params: System parameters (only lambda enters)
            cutoff: Fock cutoff N
            variant: 'total', 'rwa' (sigma+ a + sigma- a^dag) or 'counter' (sigma+ a^dag + sigma- a)

        Returns:
            Real symmetric OperatorMatrix
        """
        if variant not in INTERACTION_VARIANTS:
            raise ValueError(f"variant must be one of {INTERACTION_VARIANTS}, got '{variant}'")
        unit = _unit_interaction(cutoff, variant)
        return OperatorMatrix(cutoff, params.coupling * unit, hermitian=True)

    @staticmethod
    def h_static(params: SystemParams, omega: float, cutoff: int) -> OperatorMatrix:
        """Stationary cavity Hamiltonian H0 + V_total."""
        return HamiltonianService.h0(params, omega, cutoff) + HamiltonianService.interaction(params, cutoff, "total")

    @staticmethod
    def drive_term(omega: float, omega_dot: float, cutoff: int) -> OperatorMatrix:
        """Nonstationary term i (omega_dot / 4 omega)(a^2 - a^dag^2); Hermitian."""
        validate_frequency(omega)
        return OperatorMatrix(cutoff, (omega_dot / (4.0 * omega)) * squeeze_generator(cutoff), hermitian=True)

    @staticmethod
    def full(params: SystemParams, omega: float, omega_dot: float, cutoff: int) -> OperatorMatrix:
        """Instantaneous Hamiltonian of the nonstationary cavity."""
        return HamiltonianService.h_static(params, omega, cutoff) + HamiltonianService.drive_term(omega, omega_dot, cutoff)


def _h0_diagonal(e0: float, omega: float, cutoff: int) -> np.ndarray:
    photons, qubits = h0_parts(cutoff)
    return e0 * qubits + omega * photons


@lru_cache(maxsize=64)
def h0_parts(cutoff: int):
    """Diagonals of n and q1 + q2 in canonical order."""
    index = np.arange(dimension(cutoff))
    photons = (index // 4).astype(float)
    qubits = ((index % 4) // 2 + index % 2).astype(float)
    photons.setflags(write=False)
    qubits.setflags(write=False)
    return photons, qubits


@lru_cache(maxsize=64)
def _unit_interaction(cutoff: int, variant: str) -> np.ndarray:
    a = build_operator("annihilate", cutoff).matrix
    ad = build_operator("create", cutoff).matrix
    total = np.zeros((dimension(cutoff), dimension(cutoff)))
    for j in (1, 2):
        sp = build_operator("sigma_plus", cutoff, j).matrix
        sm = build_operator("sigma_minus", cutoff, j).matrix
        if variant in ("total", "rwa"):
            total += sp @ a + sm @ ad
        if variant in ("total", "counter"):
            total += sp @ ad + sm @ a
    total.setflags(write=False)
    return total


@lru_cache(maxsize=64)
def squeeze_generator(cutoff: int) -> np.ndarray:
    """i (a^2 - a^dag^2), a real-coefficient Hermitian matrix stored as complex."""
    a = build_operator("annihilate", cutoff).matrix
    ad = build_operator("create", cutoff).matrix
    gen = 1j * (a @ a - ad @ ad)
    gen.setflags(write=False)
    return gen


# Module-level convenience API
h0 = HamiltonianService.h0
interaction = HamiltonianService.interaction
h_static = HamiltonianService.h_static
drive_term = HamiltonianService.drive_term
