"""
Sudden-quench amplitudes and dynamical-Lamb-effect probabilities.

The cavity frequency jumps from omega1 to omega2; amplitudes are overlaps
of first-order dressed states at omega2 with the dressed ground state at
omega1, evaluated in closed form to order lambda^2.
"""
import logging
import math
from typing import Dict, Iterable, Optional

from core.guardrails import assess_validity, check_off_resonance
from models.physics import AmplitudeSet, BasisLabel, DleProbabilities, GROUND, QuenchSpec, SystemParams
from services import perturbation
from services.hilbert import StateVector

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


class QuenchService:
    """Closed-form quench observables."""

    @staticmethod
    def amplitudes(params: SystemParams, quench: QuenchSpec) -> AmplitudeSet:
        """
        The five leading amplitudes out of the dressed ground state.

        Args:
            params: System parameters
            quench: Frequency jump omega1 -> omega2

        Returns:
            AmplitudeSet with a_1_10 = a_1_01 first order and the rest second order in lambda
        """
        check_off_resonance(quench.omega2, params.e0, "omega2")
        lam = params.coupling
        e0 = params.e0
        p1 = quench.omega1 + e0
        p2 = quench.omega2 + e0
        m2 = quench.omega2 - e0

        one_photon = lam * (1.0 / p2 - 1.0 / p1)
        lam2 = lam * lam
        return AmplitudeSet(
            a_1_10=one_photon,
            a_1_01=one_photon,
            a_0_11=2.0 * lam2 / (p1 * m2),
            a_2_11=-2.0 * SQRT2 * lam2 / (p1 * p2),
            a_2_00=-2.0 * SQRT2 * lam2 / (p1 * m2),
        )

    @staticmethod
    def probabilities(params: SystemParams, quench: QuenchSpec) -> DleProbabilities:
        """Excitation probabilities; flagged, never clamped, when outside [0, 1]."""
        amps = QuenchService.amplitudes(params, quench)
        w_10 = amps.a_1_10 ** 2
        w_01 = amps.a_1_01 ** 2
        w_11 = amps.a_0_11 ** 2 + amps.a_2_11 ** 2
        warning, reason = assess_validity([w_10, w_01, w_11], [], probability_limit=1.0,
                                          coefficient_limit=math.inf)
        if warning:
            logger.warning(f"DLE probabilities leave the perturbative regime ({reason}) at "
                           f"omega1={quench.omega1:.6g}, omega2={quench.omega2:.6g}")
        return DleProbabilities(w_10=w_10, w_01=w_01, w_11=w_11, validity_warning=warning, reason=reason)

    @staticmethod
    def probabilities_from_lamb_shifts(params: SystemParams, quench: QuenchSpec) -> DleProbabilities:
        """
        Same probabilities written through the Lamb shifts:

            w_10 = (delta E_L00 / 2 lambda)^2
            w_11 = E_L00(omega1)^2 [(E_L11(omega2)/2 lambda^2)^2 + 2 (E_L00(omega2)/2 lambda^2)^2]
        """
        lam = params.coupling
        if lam == 0:
            return DleProbabilities(0.0, 0.0, 0.0)
        check_off_resonance(quench.omega2, params.e0, "omega2")
        before = perturbation.ground_lamb_shift(params, quench.omega1, "omega1")
        after = perturbation.lamb_shifts(params, quench.omega2)
        w_single = ((after.e_l_00 - before) / (2.0 * lam)) ** 2
        scale = 2.0 * lam * lam
        w_11 = before ** 2 * ((after.e_l_11 / scale) ** 2 + 2.0 * (after.e_l_00 / scale) ** 2)
        return DleProbabilities(w_10=w_single, w_01=w_single, w_11=w_11)


def complete_amplitudes(params: SystemParams, quench: QuenchSpec) -> AmplitudeSet:
    """
    Amplitudes complete to order lambda^2.

    The closed forms above keep only the product of the two first-order
    corrections. Adding the second-order dressing of the initial ground
    state and of each final state gives

        a_0_11 = lambda^2 (omega2 - omega1) / (E0 (omega1 + E0)(omega2 - E0))
        a_2_11 = sqrt2 lambda^2 (1/(omega1 + E0) - 1/(omega2 + E0))^2
        a_2_00 = sqrt2 lambda^2 (omega1 - omega2)(omega1 - omega2 + E0)
                 / (omega1 omega2 (omega1 + E0)(omega2 - E0))

    All three vanish for a null quench. The single-excitation amplitude is
    already complete at first order and is shared with the closed forms.
    """
    check_off_resonance(quench.omega2, params.e0, "omega2")
    closed = QuenchService.amplitudes(params, quench)
    lam2 = params.coupling ** 2
    e0 = params.e0
    w1, w2 = quench.omega1, quench.omega2
    p1, p2, m2 = w1 + e0, w2 + e0, w2 - e0
    return AmplitudeSet(
        a_1_10=closed.a_1_10,
        a_1_01=closed.a_1_01,
        a_0_11=lam2 * (w2 - w1) / (e0 * p1 * m2),
        a_2_11=SQRT2 * lam2 * (1.0 / p1 - 1.0 / p2) ** 2,
        a_2_00=SQRT2 * lam2 * (w1 - w2) * (w1 - w2 + e0) / (w1 * w2 * p1 * m2),
    )


def overlap_amplitude(params: SystemParams, quench: QuenchSpec, target: BasisLabel) -> float:
    """<target|_{omega2} |0;00>_{omega1} from the first-order dressed kets."""
    initial = perturbation.perturbed_state(GROUND, params, quench.omega1, "omega1")
    final = perturbation.perturbed_state(target, params, quench.omega2, "omega2")
    return final.overlap(initial)


def overlap_amplitudes(params: SystemParams, quench: QuenchSpec) -> AmplitudeSet:
    """AmplitudeSet evaluated through dressed-state overlaps."""
    return AmplitudeSet.from_table(
        {label: overlap_amplitude(params, quench, label) for label in AmplitudeSet.LABELS.values()})


def photon_sector_probabilities(params: SystemParams, quench: QuenchSpec) -> Dict[str, float]:
    """
    Photon-number probabilities when both qubits end in the same state.

    With the qubits in |00> the field holds two photons with probability
    |A_2;00|^2; with the qubits in |11> it holds zero or two photons with
    |A_0;11|^2 and |A_2;11|^2.
    """
    amps = QuenchService.amplitudes(params, quench)
    return {
        "p_00_two_photons": amps.a_2_00 ** 2,
        "p_11_zero_photons": amps.a_0_11 ** 2,
        "p_11_two_photons": amps.a_2_11 ** 2,
    }


def non_factorization(params: SystemParams, quench: QuenchSpec) -> float:
    """|w_11 - w_10 w_01| / w_11."""
    probs = QuenchService.probabilities(params, quench)
    if probs.w_11 == 0:
        return 0.0
    return abs(probs.w_11 - probs.w_10 * probs.w_01) / probs.w_11


def quench_coefficients(params: SystemParams, quench: QuenchSpec) -> Iterable[perturbation.PerturbedState]:
    """Dressed kets entering the leading amplitudes."""
    states = [perturbation.perturbed_state(GROUND, params, quench.omega1, "omega1")]
    states.extend(perturbation.perturbed_state(label, params, quench.omega2, "omega2")
                  for label in AmplitudeSet.LABELS.values())
    return states


def max_first_order_coefficient(params: SystemParams, quench: QuenchSpec) -> float:
    return perturbation.max_coefficient(quench_coefficients(params, quench))


def amplitude_state(amplitudes: AmplitudeSet, cutoff: int = 2,
                    ground_amplitude: Optional[float] = 1.0) -> StateVector:
    """
    Perturbative post-quench state over bare labels.

    The ground amplitude defaults to its leading value 1; the five quench
    amplitudes fill their labels; everything else is zero.
    """
    table: Dict[BasisLabel, float] = dict(amplitudes.by_label())
    if ground_amplitude is not None:
        table[GROUND] = ground_amplitude
    return StateVector.from_mapping(table, cutoff)


# Module-level convenience API
quench_amplitudes = QuenchService.amplitudes
dle_probabilities = QuenchService.probabilities
