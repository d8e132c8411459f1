"""
Truncated composite Hilbert space: Fock ladder (cutoff N) times two qubits.

Canonical basis order is photon-major, then q1, then q2:

    index(n, q1, q2) = 4 * n + 2 * q1 + q2

so each photon-number sector is the contiguous slice [4n, 4n + 4).
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import config
from core.errors import DimensionMismatchError, InvalidQubitIndexError, ValidityError
from models.physics import BasisLabel

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]


def dimension(cutoff: int) -> int:
    return 4 * (cutoff + 1)


def _check_cutoff(cutoff: int) -> int:
    if int(cutoff) != cutoff or cutoff < 0:
        raise ValidityError(f"Fock cutoff must be a non-negative integer, got {cutoff}", parameter="cutoff")
    return int(cutoff)


@lru_cache(maxsize=64)
def build_basis(cutoff: int) -> Tuple[BasisLabel, ...]:
    """All 4(N+1) labels in canonical order."""
    cutoff = _check_cutoff(cutoff)
    return tuple(BasisLabel(n, q1, q2) for n in range(cutoff + 1) for q1 in (0, 1) for q2 in (0, 1))


def label_index(label: BasisLabel, cutoff: Optional[int] = None) -> int:
    if cutoff is not None and label.n > cutoff:
        raise ValidityError(f"{label} lies above the cutoff N={cutoff}", parameter="cutoff")
    return 4 * label.n + 2 * label.q1 + label.q2


def index_label(index: int) -> BasisLabel:
    n, rest = divmod(index, 4)
    return BasisLabel(n, rest // 2, rest % 2)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over the canonical basis of a cutoff-N space."""
    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (dimension(self.cutoff),):
            raise DimensionMismatchError(
                f"State of length {amps.shape} does not match cutoff N={self.cutoff} (dimension {dimension(self.cutoff)})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, label: BasisLabel, cutoff: int) -> "StateVector":
        amps = np.zeros(dimension(cutoff), dtype=complex)
        amps[label_index(label, cutoff)] = 1.0
        return cls(cutoff, amps)

    @classmethod
    def from_mapping(cls, coefficients: Dict[BasisLabel, Number], cutoff: int) -> "StateVector":
        amps = np.zeros(dimension(cutoff), dtype=complex)
        for label, value in coefficients.items():
            amps[label_index(label, cutoff)] += value
        return cls(cutoff, amps)

    def __getitem__(self, label: BasisLabel) -> complex:
        return complex(self.amplitudes[label_index(label, self.cutoff)])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        norm = self.norm
        if norm == 0:
            raise ValidityError("Cannot normalize the zero vector")
        return StateVector(self.cutoff, self.amplitudes / norm)

    def is_normalized(self, tol: Optional[float] = None) -> bool:
        tol = config.NORMALIZATION_TOL if tol is None else tol
        return abs(self.norm ** 2 - 1.0) <= tol

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        if other.cutoff != self.cutoff:
            raise DimensionMismatchError(f"Cutoffs differ: {self.cutoff} vs {other.cutoff}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def sector(self, n: int) -> np.ndarray:
        """Amplitudes (00, 01, 10, 11) of the n-photon sector."""
        if n < 0 or n > self.cutoff:
            raise ValidityError(f"Photon sector {n} outside 0..{self.cutoff}", parameter="n")
        return self.amplitudes[4 * n:4 * n + 4]

    def parity_weights(self) -> Tuple[float, float]:
        """Squared norm in the even and odd excitation-parity sectors."""
        probs = np.abs(self.amplitudes) ** 2
        mask = _parity_diagonal(self.cutoff) > 0
        return float(probs[mask].sum()), float(probs[~mask].sum())

    def top_fock_weight(self) -> float:
        return float(np.sum(np.abs(self.sector(self.cutoff)) ** 2))

    def resized(self, cutoff: int) -> "StateVector":
        """Embed into (or truncate to) another cutoff."""
        amps = np.zeros(dimension(cutoff), dtype=complex)
        m = min(dimension(cutoff), dimension(self.cutoff))
        amps[:m] = self.amplitudes[:m]
        return StateVector(cutoff, amps)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense operator over the canonical basis; supports +, -, scalar *, @ and adjoint."""
    cutoff: int
    matrix: np.ndarray
    hermitian: bool = False

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    def __post_init__(self):
        mat = np.array(self.matrix)
        dim = dimension(self.cutoff)
        if mat.shape != (dim, dim):
            raise DimensionMismatchError(f"Matrix of shape {mat.shape} does not match cutoff N={self.cutoff}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        if self.hermitian:
            residual = self.hermiticity_residual()
            if residual > config.HERMITIAN_TOL * max(1.0, float(np.max(np.abs(mat), initial=0.0))):
                raise ValidityError(f"Operator flagged Hermitian has residual {residual:.3e}")

    @property
    def dim(self) -> int:
        return dimension(self.cutoff)

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def _check(self, other: "OperatorMatrix") -> None:
        if other.cutoff != self.cutoff:
            raise DimensionMismatchError(f"Operator cutoffs differ: {self.cutoff} vs {other.cutoff}")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.cutoff, self.matrix + other.matrix, self.hermitian and other.hermitian)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.cutoff, self.matrix - other.matrix, self.hermitian and other.hermitian)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.cutoff, -self.matrix, self.hermitian)

    def __mul__(self, scalar: Number) -> "OperatorMatrix":
        if isinstance(scalar, OperatorMatrix):
            raise TypeError("Use @ for operator products")
        keeps = self.hermitian and np.isreal(scalar)
        return OperatorMatrix(self.cutoff, self.matrix * scalar, bool(keeps))

    __rmul__ = __mul__

    def __matmul__(self, other: Union["OperatorMatrix", StateVector]):
        if isinstance(other, StateVector):
            if other.cutoff != self.cutoff:
                raise DimensionMismatchError(f"Operator N={self.cutoff} applied to state N={other.cutoff}")
            return StateVector(self.cutoff, self.matrix @ other.amplitudes)
        self._check(other)
        return OperatorMatrix(self.cutoff, self.matrix @ other.matrix)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.cutoff, self.matrix.conj().T, self.hermitian)

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self @ other - other @ self

    def element(self, bra: BasisLabel, ket: BasisLabel) -> complex:
        """<bra|M|ket>."""
        return complex(self.matrix[label_index(bra, self.cutoff), label_index(ket, self.cutoff)])

    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix) or bool(np.all(self.matrix.imag == 0))


def operator_sum(ops: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """Sum of operators sharing one cutoff."""
    if not ops:
        raise ValueError("operator_sum needs at least one operand")
    total = ops[0]
    for op in ops[1:]:
        total = total + op
    return total


def operator_product(ops: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """Left-to-right product ops[0] @ ops[1] @ ..."""
    if not ops:
        raise ValueError("operator_product needs at least one operand")
    total = ops[0]
    for op in ops[1:]:
        total = total @ op
    return total


# Single-factor matrices; qubit basis (|0>, |1>)
_SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])
_SIGMA_MINUS = _SIGMA_PLUS.T.copy()
_SIGMA_3 = np.diag([-1.0, 1.0])
_I2 = np.eye(2)


def _fock_annihilate(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1)


def _embed(fock: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    return np.kron(fock, np.kron(q1, q2))


_QUBIT_KINDS = {"sigma_plus": _SIGMA_PLUS, "sigma_minus": _SIGMA_MINUS, "sigma3": _SIGMA_3}


def build_operator(kind: str, cutoff: int, qubit: Optional[int] = None) -> OperatorMatrix:
    """
    Elementary operator on the composite space.

    Args:
        kind: 'annihilate', 'create', 'number', 'identity', 'sigma_plus', 'sigma_minus' or 'sigma3'
        cutoff: Fock cutoff N
        qubit: 1 or 2 for the qubit operators

    Returns:
        Real OperatorMatrix; ladder operators are zero beyond the cutoff.
    """
    cutoff = _check_cutoff(cutoff)
    return _build_operator_cached(kind, cutoff, qubit)


@lru_cache(maxsize=256)
def _build_operator_cached(kind: str, cutoff: int, qubit: Optional[int]) -> OperatorMatrix:
    eye_f = np.eye(cutoff + 1)
    if kind in _QUBIT_KINDS:
        if qubit not in (1, 2):
            raise InvalidQubitIndexError(f"Qubit index must be 1 or 2, got {qubit}")
        single = _QUBIT_KINDS[kind]
        mat = _embed(eye_f, single, _I2) if qubit == 1 else _embed(eye_f, _I2, single)
        return OperatorMatrix(cutoff, mat, hermitian=(kind == "sigma3"))

    if kind == "annihilate":
        mat = _embed(_fock_annihilate(cutoff), _I2, _I2)
        return OperatorMatrix(cutoff, mat)
    if kind == "create":
        mat = _embed(_fock_annihilate(cutoff).T, _I2, _I2)
        return OperatorMatrix(cutoff, mat)
    if kind == "number":
        mat = _embed(np.diag(np.arange(cutoff + 1, dtype=float)), _I2, _I2)
        return OperatorMatrix(cutoff, mat, hermitian=True)
    if kind == "identity":
        return OperatorMatrix(cutoff, np.eye(dimension(cutoff)), hermitian=True)

    raise ValueError(f"Unknown operator kind '{kind}'")


def swap_operator(cutoff: int) -> OperatorMatrix:
    """Permutation exchanging the two qubits."""
    swap = np.array([[1.0, 0, 0, 0], [0, 0, 1.0, 0], [0, 1.0, 0, 0], [0, 0, 0, 1.0]])
    return OperatorMatrix(cutoff, np.kron(np.eye(cutoff + 1), swap), hermitian=True)


@lru_cache(maxsize=64)
def _parity_diagonal(cutoff: int) -> np.ndarray:
    return np.array([label.parity for label in build_basis(cutoff)], dtype=float)


def parity_operator(cutoff: int) -> OperatorMatrix:
    """Diagonal (-1)^(n + q1 + q2)."""
    return OperatorMatrix(cutoff, np.diag(_parity_diagonal(cutoff)), hermitian=True)


def exchange_basis(cutoff: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal bases of the exchange-symmetric and -antisymmetric subspaces.

    Returns:
        (sym, anti): columns span the symmetric (3 per photon sector: |00>, (|01>+|10>)/sqrt2, |11>)
        and antisymmetric ((|10>-|01>)/sqrt2 per sector) subspaces.
    """
    dim = dimension(cutoff)
    sym = np.zeros((dim, 3 * (cutoff + 1)))
    anti = np.zeros((dim, cutoff + 1))
    r = 1.0 / np.sqrt(2.0)
    for n in range(cutoff + 1):
        base = 4 * n
        sym[base + 0, 3 * n + 0] = 1.0
        sym[base + 1, 3 * n + 1] = r
        sym[base + 2, 3 * n + 1] = r
        sym[base + 3, 3 * n + 2] = 1.0
        anti[base + 2, n] = r
        anti[base + 1, n] = -r
    return sym, anti


def pair_reference(label: BasisLabel, symmetric: bool, cutoff: int) -> StateVector:
    """(|n;10> +/- |n;01>)/sqrt2 for the single-excitation pair of photon number n."""
    r = 1.0 / np.sqrt(2.0)
    sign = 1.0 if symmetric else -1.0
    return StateVector.from_mapping(
        {BasisLabel(label.n, 1, 0): r, BasisLabel(label.n, 0, 1): sign * r}, cutoff)
