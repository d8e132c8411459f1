"""
Closed-form perturbation theory for the stationary two-qubit cavity Hamiltonian.

First-order dressed kets |n; q1 q2>_{lambda omega} are kept unnormalized with
coefficient 1 on the bare label. Energies are second order in lambda.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional

from core.guardrails import check_off_resonance, validate_frequency
from models.physics import BasisLabel, LambShifts, SystemParams
from services.hilbert import StateVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerturbedState:
    """First-order dressed ket: bare label plus correction coefficients."""
    base: BasisLabel
    omega: float
    coefficients: Dict[BasisLabel, float]

    def amplitude(self, label: BasisLabel) -> float:
        if label == self.base:
            return 1.0
        return self.coefficients.get(label, 0.0)

    def support(self) -> Dict[BasisLabel, float]:
        """Base plus corrections as one mapping."""
        out = {self.base: 1.0}
        out.update(self.coefficients)
        return out

    def norm_squared(self) -> float:
        return 1.0 + sum(c * c for c in self.coefficients.values())

    def to_state_vector(self, cutoff: int, normalize: bool = False) -> StateVector:
        max_n = max(label.n for label in self.support())
        if cutoff < max_n:
            raise ValueError(f"Cutoff {cutoff} too small for {self.base} (needs {max_n})")
        vec = StateVector.from_mapping(self.support(), cutoff)
        return vec.normalized() if normalize else vec

    def overlap(self, other: "PerturbedState") -> float:
        """<self|other> of the unnormalized real kets."""
        theirs = other.support()
        return sum(c * theirs[label] for label, c in self.support().items() if label in theirs)


def _detunings(params: SystemParams, omega: float, name: str = "omega", guard_minus: bool = True):
    validate_frequency(omega, name)
    if guard_minus:
        check_off_resonance(omega, params.e0, name)
    return omega - params.e0, omega + params.e0


def _uses_minus_detuning(label: BasisLabel) -> bool:
    # the bare ground ket couples only upward through 1/(omega + E0)
    return not (label.n == 0 and label.qubits == (0, 0))


def perturbed_state(label: BasisLabel, params: SystemParams, omega: float,
                    name: str = "omega") -> PerturbedState:
    """
    First-order dressed ket for a bare label.

    Args:
        label: Bare state |n; q1 q2>
        params: System parameters
        omega: Cavity frequency
        name: Parameter name reported if omega is resonant

    Returns:
        PerturbedState whose coefficients are <m|V|k>/(E_k - E_m) over the
        labels connected to k by one coupling.
    """
    d_minus, d_plus = _detunings(params, omega, name, guard_minus=_uses_minus_detuning(label))
    lam = params.coupling
    n = label.n
    coeffs: Dict[BasisLabel, float] = {}
    if lam == 0:
        return PerturbedState(label, omega, coeffs)

    down = lam * math.sqrt(n)
    up = lam * math.sqrt(n + 1)

    def put(dn: int, q1: int, q2: int, value: float) -> None:
        target = label.shifted(dn, q1, q2)
        if target is not None:
            coeffs[target] = coeffs.get(target, 0.0) + value

    if label.qubits == (0, 0):
        if n > 0:
            put(-1, 1, 0, down / d_minus)
            put(-1, 0, 1, down / d_minus)
        put(+1, 1, 0, -up / d_plus)
        put(+1, 0, 1, -up / d_plus)
    elif label.qubits in ((1, 0), (0, 1)):
        if n > 0:
            put(-1, 0, 0, down / d_plus)
            put(-1, 1, 1, down / d_minus)
        put(+1, 1, 1, -up / d_plus)
        put(+1, 0, 0, -up / d_minus)
    else:
        if n > 0:
            put(-1, 1, 0, down / d_plus)
            put(-1, 0, 1, down / d_plus)
        put(+1, 1, 0, -up / d_minus)
        put(+1, 0, 1, -up / d_minus)

    return PerturbedState(label, omega, coeffs)


def bare_energy(label: BasisLabel, params: SystemParams, omega: float) -> float:
    return label.n * omega + params.e0 * (label.q1 + label.q2)


def dressed_slope(params: SystemParams, omega: float, qubits=(0, 0)) -> float:
    """Coefficient of n in the second-order energy of each qubit configuration."""
    d_minus, d_plus = _detunings(params, omega)
    shift = 4.0 * params.coupling ** 2 * params.e0 / (d_minus * d_plus)
    if qubits == (0, 0):
        return omega + shift
    if qubits == (1, 1):
        return omega - shift
    return omega


def lamb_shifts(params: SystemParams, omega: float) -> LambShifts:
    """
    n-independent second-order shifts.

    The single-excitation entry is the diagonal second-order element
    -2 lambda^2 omega / (omega^2 - E0^2) of |n;10> (equivalently |n;01>).
    """
    d_minus, d_plus = _detunings(params, omega)
    lam2 = params.coupling ** 2
    single = -2.0 * lam2 * omega / (d_minus * d_plus)
    return LambShifts(
        e_l_00=-2.0 * lam2 / d_plus,
        e_l_10=single,
        e_l_01=single,
        e_l_11=-2.0 * lam2 / d_minus,
    )


def perturbed_energy(label: BasisLabel, params: SystemParams, omega: float) -> float:
    """Second-order energy: bare + n * (dressed slope - omega) + Lamb shift."""
    shifts = lamb_shifts(params, omega)
    slope = dressed_slope(params, omega, label.qubits)
    return label.n * slope + params.e0 * (label.q1 + label.q2) + shifts.for_qubits(label.q1, label.q2)


def exchange_resolved_energy(label: BasisLabel, params: SystemParams, omega: float,
                             symmetric: bool = True) -> float:
    """
    Second-order energies of (|n;10> +/- |n;01>)/sqrt2.

    The antisymmetric combination is decoupled from the field and keeps its
    bare energy; the symmetric one carries twice the single-excitation shift.
    Other labels fall back to perturbed_energy.
    """
    if label.q1 == label.q2:
        return perturbed_energy(label, params, omega)
    bare = bare_energy(label, params, omega)
    if not symmetric:
        return bare
    return bare + 2.0 * lamb_shifts(params, omega).e_l_10


def norm_bound(label: BasisLabel, params: SystemParams, omega: float) -> float:
    """Upper bound on | ||psi||^2 - 1 | for the first-order ket."""
    d_minus, d_plus = _detunings(params, omega)
    delta_min = min(abs(d_minus), d_plus)
    return 2.0 * (2 * label.n + 1) * params.coupling ** 2 / delta_min ** 2


def ground_lamb_shift(params: SystemParams, omega: float, name: str = "omega") -> float:
    """E_L00 alone; finite at omega = E0 since only omega + E0 enters."""
    _, d_plus = _detunings(params, omega, name, guard_minus=False)
    return -2.0 * params.coupling ** 2 / d_plus


def max_coefficient(states) -> float:
    """Largest |coefficient| across a collection of PerturbedState."""
    return max((abs(c) for s in states for c in s.coefficients.values()), default=0.0)


def second_order_sum(state: PerturbedState, params: SystemParams,
                     coupling_element: Optional[callable] = None) -> float:
    """
    sum_m |<m|V|k>|^2 / (E_k - E_m) over the first-order support.

    Uses coefficient * (E_k - E_m) = <m|V|k> unless an explicit element
    function (bra, ket) -> <bra|V|ket> is supplied.
    """
    e_k = bare_energy(state.base, params, state.omega)
    total = 0.0
    for label, coeff in state.coefficients.items():
        gap = e_k - bare_energy(label, params, state.omega)
        element = coupling_element(label, state.base) if coupling_element else coeff * gap
        total += abs(element) ** 2 / gap
    return total
