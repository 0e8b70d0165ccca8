"""g2(delta1, 0; delta2, tau) three ways.

1. the closed form,
2. quantum regression: propagate the post-click state with the generator,
3. counting coincidences in simulated click records.

The Monte Carlo estimate averages over finite detector windows and tau bins,
so it is compared with the closed form averaged the same way.
"""

import sys

import numpy as np

from dicke_fringe import SystemParams, g2_analytic, g2_numeric
from dicke_fringe.trajectories import DeltaWindow, estimate_g2, expected_estimate

budget = float(sys.argv[1]) if len(sys.argv) > 1 else 1e6
params = SystemParams.from_phi(0.8)
edges = np.arange(0.0, 4.0001, 0.25)

print("tau     closed form   regression   |diff|")
for tau in (0.0, 0.5, 1.0, 2.0, 4.0):
    a, n = g2_analytic(params, 0.0, 0.0, tau), g2_numeric(params, 0.0, 0.0, tau)
    print(f"{tau:4.1f}    {a:.8f}    {n:.8f}   {abs(a - n):.1e}")

print(f"\nMonte Carlo, simulated time {budget:.0e} / gamma (delta1 = delta2 = 0, windows +/- 0.1 rad)")
mc = estimate_g2(params, 0.0, 0.0, edges, budget, seed=1)
h = mc.histogram
w = DeltaWindow(0.0, 0.1)
print("bin            MC        +/-      expected    z")
for k in range(len(edges) - 1):
    e = expected_estimate(params, w, w, edges[k], edges[k + 1])
    z = (h.estimate[k] - e) / h.stderr[k]
    print(f"({edges[k]:.2f},{edges[k + 1]:.2f}]  {h.estimate[k]:.4f}  {h.stderr[k]:.4f}   {e:.4f}   {z:+.2f}")
