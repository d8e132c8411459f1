"""
Two-qubit entanglement: pure-state concurrence and conditional concurrences
at fixed created-photon number.
"""
import logging
import math

from core.errors import ValidityError
from core.guardrails import check_off_resonance
from models.physics import ConcurrenceReport, QuenchSpec, SectorState, SystemParams, TwoQubitPureState
from services.hilbert import StateVector
from services.quench import QuenchService

logger = logging.getLogger(__name__)


def concurrence(state: TwoQubitPureState) -> float:
    """C = 2 |ad - bc|."""
    return 2.0 * abs(state.a * state.d - state.b * state.c)


def sector_state(full: StateVector, n: int, normalize: bool = False) -> SectorState:
    """
    Qubit amplitudes of the n-photon sector.

    Args:
        full: State on the composite space
        n: Photon number (0..cutoff)
        normalize: Divide by the sector norm; an empty sector is returned as-is

    Returns:
        SectorState with the pre-normalization weight
    """
    if n < 0 or n > full.cutoff:
        raise ValidityError(f"Photon sector {n} outside 0..{full.cutoff}", parameter="n")
    a, b, c, d = (complex(x) for x in full.sector(n))
    state = TwoQubitPureState(a, b, c, d)
    weight = state.weight
    if normalize and weight > 0:
        state = state.normalize()
    return SectorState(photons=n, state=state, weight=weight)


def _normalized_concurrence(a: float, b: float, c: float, d: float) -> float:
    weight = a * a + b * b + c * c + d * d
    if weight == 0:
        return 0.0
    return concurrence(TwoQubitPureState(a, b, c, d)) / weight


def conditional_concurrences(params: SystemParams, quench: QuenchSpec,
                             normalized: bool = False) -> ConcurrenceReport:
    """
    Concurrence of the qubit pair for zero, one and two created photons.

    By default the raw amplitudes enter 2|ad - bc| without renormalizing the
    sector. With normalized=True each sector is divided by its weight.
    The zero-photon value takes the ground amplitude at its leading value 1.
    """
    amps = QuenchService.amplitudes(params, quench)
    if normalized:
        c_1 = _normalized_concurrence(0.0, amps.a_1_01, amps.a_1_10, 0.0)
        c_2 = _normalized_concurrence(amps.a_2_00, 0.0, 0.0, amps.a_2_11)
        c_0 = _normalized_concurrence(1.0, 0.0, 0.0, amps.a_0_11)
    else:
        c_1 = 2.0 * abs(amps.a_1_01 * amps.a_1_10)
        c_2 = 2.0 * abs(amps.a_2_00 * amps.a_2_11)
        c_0 = 2.0 * abs(amps.a_0_11)
    return ConcurrenceReport(c_1=c_1, c_2=c_2, c_0_leading=c_0, normalized=normalized)


def two_photon_concurrence(params: SystemParams, quench: QuenchSpec) -> float:
    """16 lambda^4 / ((omega1 + E0)^2 |omega2^2 - E0^2|)."""
    check_off_resonance(quench.omega2, params.e0, "omega2")
    e0 = params.e0
    return 16.0 * params.coupling ** 4 / ((quench.omega1 + e0) ** 2 * abs(quench.omega2 ** 2 - e0 ** 2))


def one_photon_concurrence(params: SystemParams, quench: QuenchSpec) -> float:
    """2 lambda^2 (1/(omega2 + E0) - 1/(omega1 + E0))^2."""
    e0 = params.e0
    return 2.0 * params.coupling ** 2 * (1.0 / (quench.omega2 + e0) - 1.0 / (quench.omega1 + e0)) ** 2


def state_concurrences(full: StateVector, max_photons: int = 2, normalize: bool = False):
    """Per-sector concurrence and weight for an arbitrary composite state."""
    rows = []
    for n in range(min(max_photons, full.cutoff) + 1):
        sector = sector_state(full, n, normalize=normalize)
        value = concurrence(sector.state)
        if normalize and sector.weight == 0:
            value = math.nan
        rows.append({"photons": n, "weight": sector.weight, "concurrence": value})
    return rows
