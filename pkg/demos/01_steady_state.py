"""Steady state of two driven atoms.

The populations of |g>, |s>, |a>, |e> come out of a closed form and out of
the kernel of the full 16x16 generator. Both are printed side by side, then
we look at how the drive equalizes them.
"""

import numpy as np

from dicke_fringe import SystemParams, steady_state, steady_state_closed_form

print("Omega/gamma   rho_gg    rho_ss    rho_aa    rho_ee    |closed - kernel|")
for omega in (0.1, 0.5, 1.0, 2.0, 10.0):
    params = SystemParams.from_phi(omega, phi=0.4)
    pops = np.array(steady_state_closed_form(params))
    r = steady_state(params).entries.real
    kernel = np.array([r[3, 3], r[1, 1], r[2, 2], r[0, 0]])
    print(f"{omega:10.2f}  " + "  ".join(f"{p:8.5f}" for p in pops) + f"    {np.abs(pops - kernel).max():.1e}")

# |a> only fills through |e>, so rho_aa = rho_ee at any drive; at strong
# drive all four settle at 1/4
print("\nstrong drive:", steady_state_closed_form(SystemParams.from_phi(1e3)))
