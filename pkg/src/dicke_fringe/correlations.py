"""First- and second-order photon correlations.

Two independent routes to g2: the closed-form expression (``g2_analytic``,
``g2_zero_delay``) and the quantum-regression route (``g2_numeric``), which
propagates the post-detection state with the full Liouvillian.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .detection import detection_probability, directional_lowering, lowering_matrix, reduce_on_detection
from .dynamics import (
    Populations,
    assemble_liouvillian,
    steady_state_closed_form,
    steady_state_numeric,
    unvec,
    vec,
)
from .errors import DegenerateDriveError, DomainError, SingularityError
from .qcore import Basis, DensityMatrix4, SystemParams, as_delta, require_basis

IMAG_TOL = 1e-10
# below this |nu| the 1/nu^2 in the closed form cancels catastrophically
NU_FLOOR = 5e-4


def _params(p) -> SystemParams:
    return p if isinstance(p, SystemParams) else SystemParams.from_phi(float(p))


def _require_drive(params: SystemParams) -> None:
    if params.omega == 0:
        raise DegenerateDriveError("Omega = 0: no fluorescence, g2 undefined")


@dataclass(frozen=True)
class G2Params:
    s: float
    nu: complex

    @classmethod
    def from_omega(cls, omega: float) -> "G2Params":
        s = 2.0 * omega**2 + 1.0
        return cls(s, 0.5 * np.sqrt(complex(8.0 * s - 9.0)))

    @property
    def overdamped(self) -> bool:
        return 8.0 * self.s - 9.0 < 0


@dataclass(frozen=True)
class CorrelationGrid:
    delta1: np.ndarray
    delta2: np.ndarray
    t: np.ndarray
    values: np.ndarray
    omega: float
    method: str
    stderr: np.ndarray | None = None

    def __post_init__(self):
        if self.method not in ("analytic", "numeric", "montecarlo"):
            raise ValueError(f"unknown method {self.method!r}")
        vals = np.asarray(self.values, dtype=float)
        shape = (np.size(self.delta1), np.size(self.delta2), np.size(self.t))
        if vals.shape != shape:
            raise ValueError(f"values shape {vals.shape} != axes shape {shape}")
        object.__setattr__(self, "values", vals)


# -- first order ------------------------------------------------------------

def g1_intensity(state: DensityMatrix4, delta: float) -> float:
    """Fringe intensity (1+cos d)(ee+ss) + (1-cos d)(ee+aa).

    Exact only when rho_sa = 0 (e.g. the steady state); see
    :func:`g1_bilinear` for the general form.
    """
    require_basis(state, Basis.SYMMETRIZED)
    r = state.entries.real
    c = np.cos(delta)
    return float((1 + c) * (r[0, 0] + r[1, 1]) + (1 - c) * (r[0, 0] + r[2, 2]))


def g1_bilinear(state: DensityMatrix4, delta: float) -> float:
    """sum_{mu,nu} e^{i phase_{mu nu}} <sigma+_mu sigma-_nu>, valid for any state."""
    op = lowering_matrix(delta, state.phi)
    m = state.to_product().entries
    return float(np.trace(op.conj().T @ op @ m).real)


def g1_visibility(params: SystemParams) -> float:
    pops = steady_state_closed_form(_params(params))
    return (pops.ss - pops.aa) / (2.0 * pops.ee + pops.ss + pops.aa)


# -- second order, closed form ---------------------------------------------

def _g2_bracket(s, nu, c1, c2, s1, s2, t):
    """Curly bracket of the closed form with the e^{-3t} prefactor folded in."""
    cn, sn = np.cos(nu * t), np.sin(nu * t)
    e = np.exp
    cc, ss_ = c1 * c2, s1 * s2
    return (
        4.0 * e(-t) * nu**2 * s * ss_
        + s * (e(-2.0 * t) * nu**2 * s + e(-3.0 * t) * (s - 1.0) ** 2) * cc
        - e(-1.5 * t) * nu * s**2 * (2.0 * nu * cn + 3.0 * sn)
        + 2.0 * e(-1.5 * t) * nu * s * (c1 + c2) * ((2.0 * s - 3.0) * sn - 2.0 * nu * cn)
        + (2.0 * e(-1.5 * t) * cc + s * e(-2.5 * t) * ss_) * nu
        * (2.0 * nu * (s - 2.0) * cn + (5.0 * s - 6.0) * sn)
        + 0.25 * e(-3.0 * t) * cc
        * ((s * (s * (4.0 * s - 33.0) + 64.0) - 36.0) * np.cos(2.0 * nu * t)
           + 2.0 * nu * (s - 2.0) * (5.0 * s - 6.0) * np.sin(2.0 * nu * t))
    )


def _g2_closed(omega: float, delta1, delta2, t):
    gp = G2Params.from_omega(omega)
    s, nu = gp.s, gp.nu
    c1, c2 = np.cos(delta1), np.cos(delta2)
    val = 1.0 + _g2_bracket(s, nu, c1, c2, np.sin(delta1), np.sin(delta2), t) / (
        4.0 * nu**2 * (s + c1) * (s + c2)
    )
    imag = np.max(np.abs(np.imag(val))) if np.size(val) else 0.0
    if imag > IMAG_TOL:
        raise SingularityError(f"closed-form g2 has imaginary part {imag:.3e}")
    return np.real(val)


def g2_analytic(params, delta1, delta2, t):
    """Closed-form g2(delta1, 0; delta2, t), t = gamma tau. Broadcasts over inputs."""
    params = _params(params)
    _require_drive(params)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    delta1, delta2 = np.asarray(delta1, float), np.asarray(delta2, float)
    omega = params.omega
    nu2 = G2Params.from_omega(omega).nu ** 2
    if abs(nu2) < NU_FLOOR**2:
        # removable singularity at nu = 0; d(nu^2)/d(omega) = 8 omega
        h = 1.5 * (NU_FLOOR**2 + abs(nu2)) / (8.0 * omega)
        out = 0.5 * (_g2_closed(omega + h, delta1, delta2, t) + _g2_closed(omega - h, delta1, delta2, t))
    else:
        out = _g2_closed(omega, delta1, delta2, t)
    return out if np.ndim(out) else float(out)


def g2_zero_delay(params, delta1, delta2):
    """s^2 cos^2((d1-d2)/2) / ((s + cos d1)(s + cos d2))."""
    params = _params(params)
    _require_drive(params)
    s = params.s
    delta1, delta2 = np.asarray(delta1, float), np.asarray(delta2, float)
    out = s**2 * np.cos(0.5 * (delta1 - delta2)) ** 2 / ((s + np.cos(delta1)) * (s + np.cos(delta2)))
    return out if np.ndim(out) else float(out)


# -- second order, quantum regression ---------------------------------------

class _Regression:
    """Cached pieces for repeated regression evaluations at fixed params."""

    def __init__(self, params: SystemParams):
        _require_drive(params)
        self.params = params
        self.L = assemble_liouvillian(params)
        self.rho_ss = steady_state_numeric(self.L)
        self._propagators: dict[float, np.ndarray] = {}

    def conditioned(self, delta1: float) -> np.ndarray:
        op = directional_lowering(self.params, delta1)
        return vec(reduce_on_detection(self.rho_ss, op).entries)

    def intensity_row(self, delta2: float) -> np.ndarray:
        a = directional_lowering(self.params, delta2).intensity_op
        return vec(a.T)

    def propagator(self, t: float) -> np.ndarray:
        # expm rather than an eigendecomposition: L is defective at nu = 0
        if t not in self._propagators:
            self._propagators[t] = self.L.propagator(t)
        return self._propagators[t]

    def propagated(self, v: np.ndarray, t: np.ndarray) -> np.ndarray:
        """exp(L t) v for each t; shape (len(t), 16)."""
        return np.array([self.propagator(float(tk)) @ v for tk in t])


def g2_numeric(params, det1, det2, t):
    """g2 from the conditional-probability form.

    P(det2, t | det1, 0) is the intensity at ``det2`` on the propagated
    post-detection state, divided by the steady-state intensity at ``det2``.
    """
    params = _params(params)
    reg = _Regression(params)
    d1, d2 = as_delta(params, det1), as_delta(params, det2)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0):
        raise DomainError("t must be >= 0")
    out = _regression_values(reg, np.array([d1]), np.array([d2]), ts)[0, 0]
    return out if np.ndim(t) else float(out[0])


def _regression_values(reg: _Regression, d1s, d2s, ts) -> np.ndarray:
    rows = np.array([reg.intensity_row(d) for d in d2s])  # (n2, 16)
    denom = (rows @ vec(reg.rho_ss.entries)).real
    if np.any(denom <= 0):
        raise SingularityError("zero steady-state intensity at detector 2")
    out = np.empty((len(d1s), len(d2s), len(ts)))
    for i, d1 in enumerate(d1s):
        states = reg.propagated(reg.conditioned(d1), ts)  # (nt, 16)
        num = (rows @ states.T).real  # (n2, nt)
        out[i] = num / denom[:, None]
    return out


def g2_grid(params, delta1s, delta2s, ts, method: str = "analytic") -> CorrelationGrid:
    params = _params(params)
    d1 = np.atleast_1d(np.asarray(delta1s, float))
    d2 = np.atleast_1d(np.asarray(delta2s, float))
    tt = np.atleast_1d(np.asarray(ts, float))
    if method == "analytic":
        vals = g2_analytic(params, d1[:, None, None], d2[None, :, None], tt[None, None, :])
        vals = np.broadcast_to(vals, (len(d1), len(d2), len(tt)))
    elif method == "numeric":
        vals = _regression_values(_Regression(params), d1, d2, tt)
    else:
        raise ValueError(f"grid method must be analytic or numeric, got {method!r}")
    return CorrelationGrid(d1, d2, tt, np.array(vals), params.omega, method)


def g2_zero_delay_by_reduction(params, delta1, delta2) -> float:
    """tau = 0 value as intensity-after-reduction over unconditional intensity."""
    params = _params(params)
    _require_drive(params)
    rho = steady_state_numeric(assemble_liouvillian(params))
    op2 = directional_lowering(params, delta2)
    after = reduce_on_detection(rho, directional_lowering(params, delta1))
    return detection_probability(after, op2) / detection_probability(rho, op2)


# -- classicality -------------------------------------------------------------

class InequalityResult(NamedTuple):
    lhs: float
    rhs: float
    violated: bool


def classical_inequality_check(params, delta1: float, delta2: float) -> InequalityResult:
    """(g2(1;1)-1)(g2(2;2)-1) >= (g2(1;2)-1)^2 holds for classical light."""
    params = _params(params)
    g11 = g2_zero_delay(params, delta1, delta1)
    g22 = g2_zero_delay(params, delta2, delta2)
    g12 = g2_zero_delay(params, delta1, delta2)
    lhs = (g11 - 1.0) * (g22 - 1.0)
    rhs = (g12 - 1.0) ** 2
    return InequalityResult(lhs, rhs, bool(lhs < rhs - 1e-12))


def steady_populations(params) -> Populations:
    return steady_state_closed_form(_params(params))
