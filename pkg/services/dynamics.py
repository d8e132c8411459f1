"""
Time-domain evolution of the two-qubit cavity across a frequency ramp.

    i d|psi>/dt = [H0(omega(t)) + V + i (omega_dot / 4 omega)(a^2 - a^dag^2)] |psi>

The solver runs in the interaction picture of the diagonal H0(omega(t)),
whose phases E0 (q1 + q2)(t - t0) + n * Phi(t) are known in closed form
(Phi = integral of omega). Only the ramp window [t0, t0 + tau] is
integrated: outside it the Hamiltonian is static and dressed-state
populations do not change.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg
from scipy.integrate import solve_ivp

from config.settings import config
from core.errors import CutoffLeakageError, DimensionMismatchError, StepSizeUnderflowError, ValidityError
from core.guardrails import check_normalized
from models.physics import (
    BasisLabel,
    ConcurrenceReport,
    DleProbabilities,
    GROUND,
    QuenchSpec,
    RampProtocol,
    RampShape,
    SystemParams,
)
from services import oracle
from services.hamiltonian import HamiltonianService, h0_parts, interaction, squeeze_generator
from services.hilbert import StateVector, build_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepperConfig:
    """Adaptive integrator settings."""
    method: str = field(default_factory=lambda: config.ODE_METHOD)
    rtol: float = field(default_factory=lambda: config.ODE_RTOL)
    atol: float = field(default_factory=lambda: config.ODE_ATOL)
    monitor_points: int = field(default_factory=lambda: config.MONITOR_POINTS)
    top_fock_limit: float = field(default_factory=lambda: config.TOP_FOCK_LIMIT)
    max_step: float = math.inf


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    """Final state of a ramp and its populations in the final dressed basis."""
    final: StateVector
    norm_drift: float
    overlaps: Dict[BasisLabel, complex]
    protocol: RampProtocol
    parity_drift: float = 0.0
    max_top_fock: float = 0.0
    excited_probability: float = 0.0
    evaluations: int = 0

    def probability(self, label: BasisLabel) -> float:
        return abs(self.overlaps[label]) ** 2

    def probabilities(self) -> Dict[BasisLabel, float]:
        return {label: abs(amp) ** 2 for label, amp in self.overlaps.items()}

    def dle_probabilities(self) -> DleProbabilities:
        """w_10, w_01, w_11 read off the final dressed populations."""
        return DleProbabilities(
            w_10=self.probability(BasisLabel(1, 1, 0)),
            w_01=self.probability(BasisLabel(1, 0, 1)),
            w_11=self.probability(BasisLabel(0, 1, 1)) + self.probability(BasisLabel(2, 1, 1)),
        )

    def conditional_concurrences(self) -> ConcurrenceReport:
        amp = self.overlaps
        c_1 = 2.0 * abs(amp[BasisLabel(1, 0, 0)] * amp[BasisLabel(1, 1, 1)]
                        - amp[BasisLabel(1, 0, 1)] * amp[BasisLabel(1, 1, 0)])
        c_2 = 2.0 * abs(amp[BasisLabel(2, 0, 0)] * amp[BasisLabel(2, 1, 1)]
                        - amp[BasisLabel(2, 0, 1)] * amp[BasisLabel(2, 1, 0)])
        c_0 = 2.0 * abs(amp[GROUND] * amp[BasisLabel(0, 1, 1)]
                        - amp[BasisLabel(0, 0, 1)] * amp[BasisLabel(0, 1, 0)])
        return ConcurrenceReport(c_1=c_1, c_2=c_2, c_0_leading=c_0, extrapolated=())


def omega_of_t(protocol: RampProtocol, t: float) -> Tuple[float, float]:
    """
    Cavity frequency and its time derivative.

    Returns (omega_start, 0) before t0 and (omega_end, 0) after the ramp.
    The smoothstep profile 3s^2 - 2s^3 has zero derivative at both ends.
    """
    u = t - protocol.t0
    if u < 0:
        return protocol.omega_start, 0.0
    if protocol.shape is RampShape.SUDDEN or u >= protocol.tau:
        return protocol.omega_end, 0.0

    span = protocol.omega_end - protocol.omega_start
    tau = protocol.tau
    if protocol.shape is RampShape.LINEAR:
        return protocol.omega_start + span * u / tau, span / tau

    s = u / tau
    return protocol.omega_start + span * s * s * (3.0 - 2.0 * s), span * 6.0 * s * (1.0 - s) / tau


def phase_integral(protocol: RampProtocol, t: float) -> float:
    """Integral of omega(t') dt' from t0 to t."""
    u = t - protocol.t0
    if u <= 0:
        return protocol.omega_start * u
    if protocol.shape is RampShape.SUDDEN:
        return protocol.omega_end * u

    tau = protocol.tau
    span = protocol.omega_end - protocol.omega_start
    within = min(u, tau)
    if protocol.shape is RampShape.LINEAR:
        ramp = protocol.omega_start * within + span * within * within / (2.0 * tau)
    else:
        s = within / tau
        ramp = protocol.omega_start * within + span * tau * (s ** 3 - 0.5 * s ** 4)
    return ramp + protocol.omega_end * max(u - tau, 0.0)


def default_cutoff(max_photons: int = 2) -> int:
    return max(config.DEFAULT_CUTOFF, 4 + max_photons)


def dressed_initial(params: SystemParams, omega: float, cutoff: int,
                    label: BasisLabel = GROUND) -> StateVector:
    """Exact dressed eigenstate used as the initial condition."""
    return oracle.dressed_label_vector(oracle.diagonalize(params, omega, cutoff), label)


def _parity_fraction(state: StateVector) -> float:
    even, odd = state.parity_weights()
    return even / (even + odd)


def _final_overlaps(state: StateVector, params: SystemParams, omega: float,
                    max_photons: int) -> Tuple[Dict[BasisLabel, complex], float]:
    spec = oracle.diagonalize(params, omega, state.cutoff)
    overlaps = {label: oracle.dressed_label_vector(spec, label).inner(state)
                for label in build_basis(min(max_photons, state.cutoff))}
    ground = oracle.identify_dressed(spec, GROUND).index
    populations = np.abs(spec.overlaps(state)) ** 2
    excited = float(np.sum(np.delete(populations, ground)))
    return overlaps, excited


def _check_initial(initial: StateVector, cutoff: Optional[int]) -> None:
    if cutoff is not None and cutoff != initial.cutoff:
        raise DimensionMismatchError(f"Initial state has cutoff {initial.cutoff}, requested {cutoff}")
    ok, reason = check_normalized(initial.norm ** 2)
    if not ok:
        raise ValidityError(f"Initial state must be normalized: {reason}", parameter="initial")


def _finish(initial: StateVector, final: StateVector, protocol: RampProtocol, params: SystemParams,
            max_photons: int, max_top_fock: float, evaluations: int) -> EvolutionResult:
    norm_drift = abs(final.norm - 1.0)
    if norm_drift > config.NORM_DRIFT_LIMIT:
        logger.warning(f"Norm drift {norm_drift:.2e} exceeds {config.NORM_DRIFT_LIMIT:.0e} "
                       f"({protocol.shape.value}, tau={protocol.tau:.3g})")
    parity_drift = abs(_parity_fraction(final) - _parity_fraction(initial))
    overlaps, excited = _final_overlaps(final, params, protocol.omega_end, max_photons)
    logger.debug(f"Ramp {protocol.shape.value} tau={protocol.tau:.3g}: norm drift {norm_drift:.2e}, "
                 f"parity drift {parity_drift:.2e}, excited {excited:.4e}")
    return EvolutionResult(
        final=final,
        norm_drift=norm_drift,
        overlaps=overlaps,
        protocol=protocol,
        parity_drift=parity_drift,
        max_top_fock=max_top_fock,
        excited_probability=excited,
        evaluations=evaluations,
    )


def evolve(initial: StateVector, protocol: RampProtocol, params: SystemParams,
           cutoff: Optional[int] = None, stepper: Optional[StepperConfig] = None,
           include_drive: bool = True, max_photons: int = 2) -> EvolutionResult:
    """
    Integrate the Schrodinger equation across the ramp.

    Args:
        initial: Normalized state at t0
        protocol: Frequency ramp
        params: System parameters
        cutoff: Fock cutoff; must match the initial state when given
        stepper: Adaptive integrator settings
        include_drive: Keep the (omega_dot / 4 omega)(a^2 - a^dag^2) term. Without it
            only the dressing changes and the sudden limit is the dressed projection.
        max_photons: Highest photon number in the overlap table

    Returns:
        EvolutionResult at t0 + tau

    Raises:
        StepSizeUnderflowError, CutoffLeakageError, AssignmentFailedError
    """
    _check_initial(initial, cutoff)
    stepper = stepper or StepperConfig()
    n_cut = initial.cutoff
    top = initial.top_fock_weight()
    if top > stepper.top_fock_limit:
        raise CutoffLeakageError(f"Initial top-Fock weight {top:.2e} already above {stepper.top_fock_limit:.0e}",
                                 parameter="cutoff")

    if protocol.shape is RampShape.SUDDEN:
        final = initial
        if include_drive:
            final = StateVector(n_cut, oracle.sudden_propagator(
                _as_quench(protocol), n_cut) @ initial.amplitudes)
        return _finish(initial, final, protocol, params, max_photons, max(top, final.top_fock_weight()), 0)

    photons, qubits = h0_parts(n_cut)
    coupling = interaction(params, n_cut).matrix.astype(complex)
    generator = squeeze_generator(n_cut)
    t0, t1 = protocol.t0, protocol.t_end

    def phases(t: float) -> np.ndarray:
        return np.exp(1j * (params.e0 * qubits * (t - t0) + photons * phase_integral(protocol, t)))

    def rhs(t: float, phi: np.ndarray) -> np.ndarray:
        omega, omega_dot = omega_of_t(protocol, t)
        ph = phases(t)
        h = coupling if not include_drive else coupling + (omega_dot / (4.0 * omega)) * generator
        return -1j * ph * (h @ (ph.conj() * phi))

    t_eval = np.linspace(t0, t1, max(stepper.monitor_points, 2))
    sol = solve_ivp(rhs, (t0, t1), initial.amplitudes.astype(complex), method=stepper.method,
                    t_eval=t_eval, rtol=stepper.rtol, atol=stepper.atol, max_step=stepper.max_step)
    if sol.status == -1:
        raise StepSizeUnderflowError(f"Integrator failed at tau={protocol.tau:.3g}: {sol.message}",
                                     parameter="tau")

    top_weights = np.sum(np.abs(sol.y[-4:, :]) ** 2, axis=0)
    max_top = float(max(top, np.max(top_weights)))
    if max_top > stepper.top_fock_limit:
        raise CutoffLeakageError(
            f"Top-Fock occupation reached {max_top:.2e} (limit {stepper.top_fock_limit:.0e}) at N={n_cut}",
            parameter="cutoff")

    final = StateVector(n_cut, sol.y[:, -1] / phases(t1))
    return _finish(initial, final, protocol, params, max_photons, max_top, int(sol.nfev))


def evolve_exponential_midpoint(initial: StateVector, protocol: RampProtocol, params: SystemParams,
                                steps: int = 2000, include_drive: bool = True,
                                max_photons: int = 2) -> EvolutionResult:
    """Fixed-step cross-check: psi <- expm(-i H(t + dt/2) dt) psi."""
    _check_initial(initial, None)
    if protocol.shape is RampShape.SUDDEN:
        return evolve(initial, protocol, params, include_drive=include_drive, max_photons=max_photons)
    if steps < 1:
        raise ValidityError(f"steps must be positive, got {steps}", parameter="steps")

    n_cut = initial.cutoff
    dt = protocol.tau / steps
    psi = initial.amplitudes.astype(complex)
    max_top = initial.top_fock_weight()
    for k in range(steps):
        omega, omega_dot = omega_of_t(protocol, protocol.t0 + (k + 0.5) * dt)
        if include_drive:
            h = HamiltonianService.full(params, omega, omega_dot, n_cut).matrix
        else:
            h = HamiltonianService.h_static(params, omega, n_cut).matrix
        psi = scipy.linalg.expm(-1j * dt * h) @ psi
        max_top = max(max_top, float(np.sum(np.abs(psi[-4:]) ** 2)))

    return _finish(initial, StateVector(n_cut, psi), protocol, params, max_photons, max_top, steps)


def _as_quench(protocol: RampProtocol) -> QuenchSpec:
    return QuenchSpec(protocol.omega_start, protocol.omega_end)


def log_tau_grid(tau_min: float, tau_max: float, points: int) -> np.ndarray:
    """Logarithmically spaced ramp durations."""
    if not 0 < tau_min <= tau_max:
        raise ValidityError(f"Need 0 < tau_min <= tau_max, got {tau_min}, {tau_max}", parameter="tau")
    if points < 1:
        raise ValidityError(f"Grid needs at least one point, got {points}", parameter="tau")
    return np.geomspace(tau_min, tau_max, points)


def _scan_row(result: EvolutionResult, omega_start: float) -> Dict[str, float]:
    probs = result.dle_probabilities()
    conc = result.conditional_concurrences()
    tau = result.protocol.tau
    return {
        "tau": tau,
        "tau_omega1": tau * omega_start,
        "w_10": probs.w_10,
        "w_01": probs.w_01,
        "w_11": probs.w_11,
        "excited_probability": result.excited_probability,
        "c_1": conc.c_1,
        "c_2": conc.c_2,
        "norm_drift": result.norm_drift,
        "parity_drift": result.parity_drift,
    }


def limit_scan(params: SystemParams, protocol: RampProtocol, tau_grid: Sequence[float],
               cutoff: Optional[int] = None, include_drive: bool = True,
               stepper: Optional[StepperConfig] = None, workers: Optional[int] = None) -> pd.DataFrame:
    """
    Evolve the dressed ground state for every ramp duration in the grid.

    The protocol fixes shape, endpoints and onset; tau is taken from the
    grid, which must be strictly increasing. Rows come back in grid order.
    A rise of the excited probability with tau is logged and marked in the
    ``trend_ok`` column.
    """
    taus = np.asarray(tau_grid, dtype=float)
    if taus.size == 0:
        raise ValidityError("tau grid is empty", parameter="tau")
    if np.any(taus <= 0) or np.any(np.diff(taus) <= 0):
        raise ValidityError("tau grid must be positive and strictly increasing", parameter="tau")
    if protocol.shape is RampShape.SUDDEN:
        raise ValidityError("A tau scan needs a linear or smoothstep ramp", parameter="shape")

    cutoff = default_cutoff() if cutoff is None else cutoff
    initial = dressed_initial(params, protocol.omega_start, cutoff)
    # warm the cache so workers share one decomposition per frequency
    oracle.diagonalize(params, protocol.omega_end, cutoff)

    def run(tau: float) -> Dict[str, float]:
        result = evolve(initial, protocol.with_tau(float(tau)), params, stepper=stepper,
                        include_drive=include_drive)
        return _scan_row(result, protocol.omega_start)

    workers = workers or config.WORKERS
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(run, taus))

    table = pd.DataFrame(rows)
    excited = table["excited_probability"].to_numpy()
    trend = np.ones(len(table), dtype=bool)
    trend[1:] = excited[1:] <= excited[:-1] * (1.0 + 1e-6) + 1e-14
    table["trend_ok"] = trend
    if not trend.all():
        bad = table.loc[~table["trend_ok"], "tau"].tolist()
        logger.warning(f"Excited probability is not monotone in tau; rises at tau={bad}")
    logger.info(f"Scanned {len(table)} ramp durations ({protocol.shape.value}, drive={include_drive})")
    return table
