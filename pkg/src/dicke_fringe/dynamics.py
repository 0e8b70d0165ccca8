"""Rotating-frame Liouvillian, propagation and steady states.

Density matrices are vectorized column-major (``vec(A X B) = (B^T kron A) vec(X)``).

Drive phases: atom mu at ``x_mu = +/- x12/2`` couples through
``-Omega (e^{-i k_L.x_mu} sigma+_mu + h.c.)``. This is the sign convention
under which the bright state is exactly |s> of the symmetrized basis and the
reduced 6+3 equations hold as written.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DegenerateDriveError, DomainError, SingularityError
from .qcore import Basis, DensityMatrix4, SymmetrizedBasis, SystemParams, pauli_ops, to_symmetrized

_I4 = np.eye(4, dtype=complex)
TRACE_ROW = _I4.reshape(-1, order="F")


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v).reshape(4, 4, order="F")


def spre(a: np.ndarray) -> np.ndarray:
    return np.kron(_I4, a)


def spost(a: np.ndarray) -> np.ndarray:
    return np.kron(a.T, _I4)


def sprepost(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of X -> a X b."""
    return np.kron(b.T, a)


@dataclass(frozen=True)
class SuperOp:
    matrix: np.ndarray
    params: SystemParams
    basis: Basis = Basis.PRODUCT

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, rho: DensityMatrix4) -> np.ndarray:
        """L rho as a 4x4 product-basis matrix."""
        return unvec(self.matrix @ vec(rho.to_product().entries))

    def propagator(self, t: float) -> np.ndarray:
        if t < 0:
            raise DomainError(f"propagation time must be >= 0, got {t!r}")
        if t == 0:
            return np.eye(16, dtype=complex)
        return scipy.linalg.expm(self.matrix * t)


def hamiltonian(params: SystemParams) -> np.ndarray:
    ops = pauli_ops()
    phi = params.phi
    c1, c2 = np.exp(-1j * phi), np.exp(1j * phi)
    drive = c1 * ops.sp1 + c2 * ops.sp2
    return -params.omega * (drive + drive.conj().T)


def assemble_liouvillian(params: SystemParams) -> SuperOp:
    ops = pauli_ops()
    h = hamiltonian(params)
    gen = -1j * (spre(h) - spost(h))
    g = params.gamma
    for sm, n in ((ops.sm1, ops.n1), (ops.sm2, ops.n2)):
        gen += g * (2.0 * sprepost(sm, sm.conj().T) - spre(n) - spost(n))
    return SuperOp(gen, params)


def propagate(L: SuperOp, rho0: DensityMatrix4, t: float) -> DensityMatrix4:
    """rho(t) = exp(L t) rho0, returned in the basis of ``rho0``."""
    if t < 0:
        raise DomainError(f"propagation time must be >= 0, got {t!r}")
    if t == 0:
        return rho0
    prod = rho0.to_product()
    out = DensityMatrix4(unvec(L.propagator(t) @ vec(prod.entries)))
    if rho0.basis is Basis.SYMMETRIZED:
        return to_symmetrized(out, SymmetrizedBasis(rho0.phi))
    return out


class Populations(NamedTuple):
    gg: float
    ss: float
    aa: float
    ee: float


def _require_drive(params: SystemParams) -> None:
    if params.omega == 0:
        raise DegenerateDriveError("Omega = 0: the atoms never fluoresce")


def steady_state_closed_form(params: SystemParams) -> Populations:
    """Steady-state populations in the symmetrized basis (independent of phi)."""
    _require_drive(params)
    g2 = params.gamma**2
    w2 = params.omega**2
    d = (g2 + 2.0 * w2) ** 2
    return Populations(
        gg=(g2 + w2) ** 2 / d,
        ss=w2 * (2.0 * g2 + w2) / d,
        aa=w2 * w2 / d,
        ee=w2 * w2 / d,
    )


def steady_state_numeric(L: SuperOp) -> DensityMatrix4:
    """Kernel of L normalized to unit trace, via a bordered linear solve."""
    _require_drive(L.params)
    a = np.array(L.matrix)
    a[0, :] = TRACE_ROW
    b = np.zeros(16, dtype=complex)
    b[0] = 1.0
    if np.linalg.cond(a) > 1e12:
        raise SingularityError("generator kernel is not one-dimensional")
    x = np.linalg.solve(a, b)
    m = unvec(x)
    m = 0.5 * (m + m.conj().T)
    resid = np.linalg.norm(L.matrix @ vec(m))
    if resid > 1e-11:
        raise SingularityError(f"steady-state residual {resid:.3e} too large")
    return DensityMatrix4(m)


def steady_state(params: SystemParams) -> DensityMatrix4:
    """Full steady state (symmetrized basis) from the numeric kernel."""
    rho = steady_state_numeric(assemble_liouvillian(params))
    return to_symmetrized(rho, SymmetrizedBasis(params.phi))


@dataclass(frozen=True)
class ReducedState:
    """The 9 real coordinates of the two decoupled sets; rho_gg = 1 - ee - ss - aa."""

    ee: float
    ss: float
    aa: float
    es_i: float
    sg_i: float
    eg_r: float
    ea_r: float
    sa_i: float
    ag_r: float

    @property
    def gg(self) -> float:
        return 1.0 - self.ee - self.ss - self.aa

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, x) -> "ReducedState":
        return cls(*(float(v) for v in x))

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def reduce_state(rho: DensityMatrix4, phi: float | None = None) -> ReducedState:
    """Project a state onto the 9 reduced coordinates."""
    r = rho.to_symmetrized(phi).entries
    return ReducedState(
        ee=r[0, 0].real, ss=r[1, 1].real, aa=r[2, 2].real,
        es_i=r[0, 1].imag, sg_i=r[1, 3].imag, eg_r=r[0, 3].real,
        ea_r=r[0, 2].real, sa_i=r[1, 2].imag, ag_r=r[2, 3].real,
    )


def embed_reduced(state: ReducedState, phi: float = 0.0) -> DensityMatrix4:
    """Symmetrized-basis matrix with only the reduced coordinates populated."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0], m[1, 1], m[2, 2], m[3, 3] = state.ee, state.ss, state.aa, state.gg
    for (i, j), val in (
        ((0, 1), 1j * state.es_i), ((1, 3), 1j * state.sg_i), ((0, 3), state.eg_r),
        ((0, 2), state.ea_r), ((1, 2), 1j * state.sa_i), ((2, 3), state.ag_r),
    ):
        m[i, j] = val
        m[j, i] = np.conj(val)
    return DensityMatrix4(m, Basis.SYMMETRIZED, phi)


def reduced_rhs(state: ReducedState, alpha: float) -> ReducedState:
    """Time derivative of the reduced coordinates, alpha = Omega/(sqrt(2) gamma)."""
    ee, ss, aa = state.ee, state.ss, state.aa
    es, sg, eg = state.es_i, state.sg_i, state.eg_r
    ea, sa, ag = state.ea_r, state.sa_i, state.ag_r
    a = alpha
    return ReducedState(
        ee=4.0 * (a * es - ee),
        ss=2.0 * (ee - ss + 2.0 * a * (sg - es)),
        aa=2.0 * (ee - aa),
        es_i=-3.0 * es - 2.0 * a * (ee - ss + eg),
        sg_i=2.0 * es - sg + 2.0 * a * (1.0 - ee - aa - 2.0 * ss + eg),
        eg_r=-2.0 * (eg + a * (sg - es)),
        ea_r=-3.0 * ea - 2.0 * a * sa,
        sa_i=2.0 * (a * (ea + ag) - sa),
        ag_r=-2.0 * ea - 2.0 * a * sa - ag,
    )


def spectral_gap(L: SuperOp) -> float:
    """Smallest |Re lambda| over the nonzero eigenvalues of L."""
    ev = np.linalg.eigvals(L.matrix)
    ev = ev[np.argsort(np.abs(ev))][1:]
    return float(np.min(-ev.real))
