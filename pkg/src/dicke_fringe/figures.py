"""Data behind the steady-state and fringe figures, on fixed grids."""

from __future__ import annotations

import numpy as np

from .correlations import g1_intensity, g2_zero_delay
from .dynamics import steady_state, steady_state_closed_form
from .qcore import SystemParams

FIG_OMEGA = 0.8
FIG3_OMEGAS = np.round(np.linspace(0.05, 5.0, 100), 12)
# two full periods, multiples of pi/100 so that n*pi lands on grid points
FRINGE_DELTAS = np.linspace(0.0, 4.0 * np.pi, 401)


def fig3() -> dict[str, np.ndarray]:
    """Steady-state populations against Omega/gamma."""
    pops = np.array([steady_state_closed_form(SystemParams.from_phi(w)) for w in FIG3_OMEGAS])
    return {"omega": FIG3_OMEGAS, "rho_gg": pops[:, 0], "rho_ss": pops[:, 1],
            "rho_aa": pops[:, 2], "rho_ee": pops[:, 3]}


def fig4(omega: float = FIG_OMEGA, deltas=FRINGE_DELTAS) -> dict[str, np.ndarray]:
    """Single-detector g2(delta, delta, 0)."""
    deltas = np.asarray(deltas, float)
    return {"delta": deltas, "value": np.asarray(g2_zero_delay(omega, deltas, deltas))}


def pair_scan(delta1: float, omega: float = FIG_OMEGA, deltas=FRINGE_DELTAS) -> dict[str, np.ndarray]:
    deltas = np.asarray(deltas, float)
    return {"delta": deltas, "value": np.asarray(g2_zero_delay(omega, delta1, deltas))}


def fig5(omega: float = FIG_OMEGA) -> dict[str, np.ndarray]:
    return pair_scan(0.0, omega)


def fig6(omega: float = FIG_OMEGA) -> dict[str, np.ndarray]:
    return pair_scan(np.pi, omega)


def g1_fringe(omega: float, deltas=FRINGE_DELTAS) -> dict[str, np.ndarray]:
    rho = steady_state(SystemParams.from_phi(omega))
    deltas = np.asarray(deltas, float)
    return {"delta": deltas, "value": np.array([g1_intensity(rho, d) for d in deltas])}


FIGURES = {"3": fig3, "4": fig4, "5": fig5, "6": fig6}
