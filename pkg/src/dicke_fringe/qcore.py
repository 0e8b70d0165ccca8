"""Domain types, bases and geometry for a pair of two-level atoms.

Conventions used throughout the package:

* Single-atom basis ordering is ``(|e>, |g>)``.
* Product basis ordering is ``(|ee>, |eg>, |ge>, |gg>)`` with
  ``|ij> = |i>_1 (x) |j>_2``.
* Symmetrized basis ordering is ``(|e>, |s>, |a>, |g>)`` with
  ``|s> = (e^{-i phi}|eg> + e^{i phi}|ge>)/sqrt(2)`` and
  ``|a> = (e^{-i phi}|eg> - e^{i phi}|ge>)/sqrt(2)``, ``phi = k_L.x12 / 2``.
* Everything is dimensionless: gamma = 1, times in 1/gamma, Omega in units of
  gamma, lengths in optical wavelengths (so k = 2 pi).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BasisMismatchError, InvalidGeometryError, InvalidStateError

TWO_PI = 2.0 * np.pi
GAMMA = 1.0

UNIT_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-10

PRODUCT_LABELS = ("ee", "eg", "ge", "gg")
SYMMETRIZED_LABELS = ("e", "s", "a", "g")


class Basis(enum.Enum):
    PRODUCT = "product"
    SYMMETRIZED = "symmetrized"


def _unit_vector(v, what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise InvalidGeometryError(f"{what} must be a 3-vector, got shape {arr.shape}")
    if abs(np.linalg.norm(arr) - 1.0) > UNIT_TOL:
        raise InvalidGeometryError(f"{what} must have unit norm, |{what}| = {np.linalg.norm(arr)!r}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs: drive strength and geometry.

    ``omega`` is Omega/gamma (half the Rabi frequency). ``atom_separation``
    is x12 = x1 - x2 in wavelengths.
    """

    omega: float
    laser_dir: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    atom_separation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        omega = float(self.omega)
        if not np.isfinite(omega) or omega < 0:
            raise InvalidGeometryError(f"omega must be finite and >= 0, got {self.omega!r}")
        sep = np.asarray(self.atom_separation, dtype=float)
        if sep.shape != (3,) or not np.all(np.isfinite(sep)):
            raise InvalidGeometryError("atom_separation must be a finite 3-vector")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "laser_dir", _frozen(_unit_vector(self.laser_dir, "laser_dir")))
        object.__setattr__(self, "atom_separation", _frozen(sep))

    @classmethod
    def from_phi(cls, omega: float, phi: float = 0.0) -> "SystemParams":
        """Geometry with the laser along z and the atoms separated along z
        by exactly the amount that gives laser phase ``phi``."""
        return cls(omega, np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, phi / np.pi]))

    @property
    def gamma(self) -> float:
        return GAMMA

    @property
    def laser_phase(self) -> float:
        """k_L . x12 in radians."""
        return TWO_PI * float(self.laser_dir @ self.atom_separation)

    @property
    def phi(self) -> float:
        return 0.5 * self.laser_phase

    @property
    def s(self) -> float:
        return 2.0 * self.omega**2 + 1.0

    @property
    def alpha(self) -> float:
        return self.omega / np.sqrt(2.0)

    def with_omega(self, omega: float) -> "SystemParams":
        return SystemParams(omega, self.laser_dir, self.atom_separation)


@dataclass(frozen=True)
class SymmetrizedBasis:
    phi: float = 0.0

    @property
    def vectors(self) -> np.ndarray:
        """Columns are |e>, |s>, |a>, |g> in product-basis coordinates."""
        w = np.exp(-1j * self.phi) / np.sqrt(2.0)
        v = np.zeros((4, 4), dtype=complex)
        v[0, 0] = 1.0
        v[1, 1], v[2, 1] = w, np.conj(w)
        v[1, 2], v[2, 2] = w, -np.conj(w)
        v[3, 3] = 1.0
        return v

    @property
    def matrix(self) -> np.ndarray:
        """Unitary U with rho_sym = U rho_prod U^dagger."""
        return self.vectors.conj().T


@dataclass(frozen=True)
class DetectionDirection:
    """Either a unit direction ``dir`` or a bare detection phase ``phase``."""

    dir: np.ndarray | None = None
    phase: float | None = None

    def __post_init__(self):
        if (self.dir is None) == (self.phase is None):
            raise InvalidGeometryError("give exactly one of dir or phase")
        if self.dir is not None:
            object.__setattr__(self, "dir", _frozen(_unit_vector(self.dir, "dir")))
        else:
            object.__setattr__(self, "phase", float(self.phase))

    @classmethod
    def along(cls, v) -> "DetectionDirection":
        return cls(dir=np.asarray(v, dtype=float))

    @classmethod
    def at_phase(cls, delta: float) -> "DetectionDirection":
        return cls(phase=delta)


class Phase(NamedTuple):
    raw: float
    reduced: float


def reduce_phase(x: float) -> float:
    r = float(np.mod(x, TWO_PI))
    return 0.0 if r == TWO_PI else r


def delta_phase(params: SystemParams, det: DetectionDirection | float) -> Phase:
    """Detection phase delta = (k_L - k r_hat) . x12."""
    if not isinstance(det, DetectionDirection):
        det = DetectionDirection.at_phase(det)
    if det.phase is not None:
        raw = det.phase
    else:
        raw = TWO_PI * float((params.laser_dir - det.dir) @ params.atom_separation)
    return Phase(raw, reduce_phase(raw))


def as_delta(params: SystemParams, det) -> float:
    """Raw delta from a DetectionDirection or a plain float."""
    if isinstance(det, DetectionDirection):
        return delta_phase(params, det).raw
    return float(det)


@dataclass(frozen=True)
class DensityMatrix4:
    entries: np.ndarray
    basis: Basis = Basis.PRODUCT
    phi: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (4, 4):
            raise InvalidStateError(f"expected a 4x4 matrix, got shape {arr.shape}")
        object.__setattr__(self, "entries", _frozen(arr))
        object.__setattr__(self, "phi", float(self.phi))

    @classmethod
    def from_ket(cls, ket, basis: Basis = Basis.PRODUCT, phi: float = 0.0) -> "DensityMatrix4":
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()), basis, phi)

    @classmethod
    def basis_state(cls, label: str, phi: float | None = None) -> "DensityMatrix4":
        """``basis_state("eg")`` in the product basis, ``basis_state("s", phi)``
        in the symmetrized one."""
        if label in PRODUCT_LABELS and phi is None:
            ket = np.zeros(4)
            ket[PRODUCT_LABELS.index(label)] = 1.0
            return cls.from_ket(ket)
        if label in SYMMETRIZED_LABELS:
            ket = np.zeros(4)
            ket[SYMMETRIZED_LABELS.index(label)] = 1.0
            return cls.from_ket(ket, Basis.SYMMETRIZED, phi or 0.0)
        raise InvalidStateError(f"unknown basis label {label!r}")

    def __getitem__(self, key: str) -> complex:
        """Element access by label pair, e.g. ``rho["sa"]`` or ``rho["eg", "ge"]``."""
        labels = PRODUCT_LABELS if self.basis is Basis.PRODUCT else SYMMETRIZED_LABELS
        if isinstance(key, tuple):
            i, j = key
        else:
            i, j = key[: len(key) // 2], key[len(key) // 2:]
        return complex(self.entries[labels.index(i), labels.index(j)])

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def validate(self) -> "DensityMatrix4":
        m = self.entries
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {np.trace(m)!r}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
        if lo < POSITIVITY_TOL:
            raise InvalidStateError(f"negative eigenvalue {lo!r}")
        return self

    def to_product(self) -> "DensityMatrix4":
        return to_product(self)

    def to_symmetrized(self, phi: float | None = None) -> "DensityMatrix4":
        if self.basis is Basis.SYMMETRIZED and (phi is None or phi == self.phi):
            return self
        prod = to_product(self)
        return to_symmetrized(prod, SymmetrizedBasis(self.phi if phi is None else phi))


def require_basis(rho: DensityMatrix4, basis: Basis) -> None:
    if rho.basis is not basis:
        raise BasisMismatchError(f"expected {basis.value} basis, got {rho.basis.value}")


def to_symmetrized(rho: DensityMatrix4, basis: SymmetrizedBasis) -> DensityMatrix4:
    require_basis(rho, Basis.PRODUCT)
    u = basis.matrix
    return DensityMatrix4(u @ rho.entries @ u.conj().T, Basis.SYMMETRIZED, basis.phi)


def to_product(rho: DensityMatrix4) -> DensityMatrix4:
    if rho.basis is Basis.PRODUCT:
        return rho
    u = SymmetrizedBasis(rho.phi).matrix
    return DensityMatrix4(u.conj().T @ rho.entries @ u, Basis.PRODUCT)


class PauliOps(NamedTuple):
    sm1: np.ndarray
    sm2: np.ndarray
    sp1: np.ndarray
    sp2: np.ndarray
    n1: np.ndarray
    n2: np.ndarray


_SM = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def pauli_ops() -> PauliOps:
    """Single-atom ladder and number operators in the product basis."""
    sm1 = np.kron(_SM, _I2)
    sm2 = np.kron(_I2, _SM)
    sp1, sp2 = sm1.conj().T, sm2.conj().T
    ops = PauliOps(sm1, sm2, sp1, sp2, sp1 @ sm1, sp2 @ sm2)
    for op in ops:
        op.setflags(write=False)
    return ops


def partial_traces(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduced 2x2 states of atom 1 and atom 2 from a product-basis matrix."""
    t = np.asarray(m).reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", t), np.einsum("ijil->jl", t)
