"""
Data models for the two-qubit cavity system.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from core.errors import ValidityError
from core.guardrails import validate_frequency, validate_system_params


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Bare state |n; q1 q2>: photon number plus two qubit occupations."""
    n: int
    q1: int
    q2: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Photon number must be non-negative, got {self.n}")
        if self.q1 not in (0, 1) or self.q2 not in (0, 1):
            raise ValueError(f"Qubit levels must be 0 or 1, got ({self.q1}, {self.q2})")

    @property
    def excitations(self) -> int:
        return self.n + self.q1 + self.q2

    @property
    def parity(self) -> int:
        """Excitation parity (-1)^(n + q1 + q2)."""
        return -1 if self.excitations % 2 else 1

    @property
    def qubits(self) -> Tuple[int, int]:
        return self.q1, self.q2

    def shifted(self, dn: int, q1: int, q2: int) -> Optional["BasisLabel"]:
        """Label with n + dn and new qubit bits, or None below the vacuum."""
        if self.n + dn < 0:
            return None
        return BasisLabel(self.n + dn, q1, q2)

    @classmethod
    def from_string(cls, text: str) -> "BasisLabel":
        """Parse 'n;q1q2' (e.g. '2;11') or 'n,q1,q2'."""
        cleaned = text.strip().strip("|>")
        if ";" in cleaned:
            n_part, q_part = cleaned.split(";", 1)
            q_part = q_part.strip()
            if len(q_part) != 2:
                raise ValueError(f"Cannot parse basis label '{text}'")
            return cls(int(n_part), int(q_part[0]), int(q_part[1]))
        parts = [p for p in cleaned.replace(" ", "").split(",") if p]
        if len(parts) != 3:
            raise ValueError(f"Cannot parse basis label '{text}'")
        return cls(*(int(p) for p in parts))

    def __str__(self) -> str:
        return f"|{self.n};{self.q1}{self.q2}>"


GROUND = BasisLabel(0, 0, 0)


@dataclass(frozen=True)
class SystemParams:
    """Qubit transition frequency E0 and qubit-photon coupling lambda (hbar = 1)."""
    e0: float
    coupling: float

    def __post_init__(self):
        validate_system_params(self.e0, self.coupling)

    def with_coupling(self, coupling: float) -> "SystemParams":
        return SystemParams(e0=self.e0, coupling=coupling)

    def scaled(self, factor: float) -> "SystemParams":
        return SystemParams(e0=self.e0 * factor, coupling=self.coupling * factor)


@dataclass(frozen=True)
class QuenchSpec:
    """Sudden change of the cavity frequency from omega1 to omega2."""
    omega1: float
    omega2: float

    def __post_init__(self):
        validate_frequency(self.omega1, "omega1")
        validate_frequency(self.omega2, "omega2")

    @property
    def is_null(self) -> bool:
        return self.omega1 == self.omega2

    def scaled(self, factor: float) -> "QuenchSpec":
        return QuenchSpec(self.omega1 * factor, self.omega2 * factor)


@dataclass(frozen=True)
class LambShifts:
    """n-independent second-order shifts of the four qubit configurations."""
    e_l_00: float
    e_l_10: float
    e_l_01: float
    e_l_11: float

    def for_qubits(self, q1: int, q2: int) -> float:
        return {(0, 0): self.e_l_00, (1, 0): self.e_l_10,
                (0, 1): self.e_l_01, (1, 1): self.e_l_11}[(q1, q2)]


@dataclass(frozen=True)
class AmplitudeSet:
    """Leading quench amplitudes out of the dressed ground state."""
    a_1_10: float
    a_1_01: float
    a_0_11: float
    a_2_11: float
    a_2_00: float

    LABELS = {
        "a_1_10": BasisLabel(1, 1, 0),
        "a_1_01": BasisLabel(1, 0, 1),
        "a_0_11": BasisLabel(0, 1, 1),
        "a_2_11": BasisLabel(2, 1, 1),
        "a_2_00": BasisLabel(2, 0, 0),
    }

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in self.LABELS}

    def by_label(self) -> Dict[BasisLabel, float]:
        return {label: getattr(self, name) for name, label in self.LABELS.items()}

    @classmethod
    def from_table(cls, table: Dict[BasisLabel, float]) -> "AmplitudeSet":
        return cls(**{name: float(table[label]) for name, label in cls.LABELS.items()})


@dataclass(frozen=True)
class DleProbabilities:
    """Single- and two-qubit excitation probabilities of the dynamical Lamb effect."""
    w_10: float
    w_01: float
    w_11: float
    validity_warning: bool = False
    reason: str = ""

    def as_dict(self) -> Dict[str, float]:
        return {"w_10": self.w_10, "w_01": self.w_01, "w_11": self.w_11}


@dataclass(frozen=True)
class TwoQubitPureState:
    """a|00> + b|01> + c|10> + d|11>, first digit = qubit 1."""
    a: complex
    b: complex
    c: complex
    d: complex
    normalized: bool = False

    def __post_init__(self):
        if self.normalized:
            total = self.weight
            if abs(total - 1.0) > 1e-10:
                raise ValidityError(f"State flagged normalized has norm^2 {total:.12g}")

    @property
    def weight(self) -> float:
        return float(abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2)

    def normalize(self) -> "TwoQubitPureState":
        w = self.weight
        if w == 0:
            raise ValidityError("Cannot normalize the zero state")
        s = 1.0 / math.sqrt(w)
        return TwoQubitPureState(self.a * s, self.b * s, self.c * s, self.d * s, normalized=True)


@dataclass(frozen=True)
class SectorState:
    """Qubit amplitudes inside a fixed photon-number sector."""
    photons: int
    state: TwoQubitPureState
    weight: float


@dataclass(frozen=True)
class ConcurrenceReport:
    """Conditional concurrences at fixed created-photon number."""
    c_1: float
    c_2: float
    c_0_leading: Optional[float] = None
    normalized: bool = False
    extrapolated: Tuple[str, ...] = field(default=("c_0_leading",))


class RampShape(Enum):
    SUDDEN = "sudden"
    LINEAR = "linear"
    SMOOTHSTEP = "smoothstep"


@dataclass(frozen=True)
class RampProtocol:
    """Time profile of the cavity frequency between omega_start and omega_end."""
    shape: RampShape
    omega_start: float
    omega_end: float
    tau: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if isinstance(self.shape, str):
            object.__setattr__(self, "shape", RampShape(self.shape))
        validate_frequency(self.omega_start, "omega_start")
        validate_frequency(self.omega_end, "omega_end")
        if self.shape is not RampShape.SUDDEN and not self.tau > 0:
            raise ValidityError(f"Ramp duration tau must be positive for {self.shape.value}, got {self.tau}",
                                parameter="tau")

    @property
    def t_end(self) -> float:
        return self.t0 + (0.0 if self.shape is RampShape.SUDDEN else self.tau)

    def with_tau(self, tau: float) -> "RampProtocol":
        return RampProtocol(self.shape, self.omega_start, self.omega_end, tau, self.t0)

    @classmethod
    def from_quench(cls, quench: QuenchSpec, shape: str = "linear", tau: float = 0.0,
                    t0: float = 0.0) -> "RampProtocol":
        return cls(RampShape(shape), quench.omega1, quench.omega2, tau, t0)
