"""One photon click turns an uncorrelated pair into an entangled one.

In the steady state the atoms are independent (the state factorizes). A
click at detection phase delta projects onto sigma-(delta) rho sigma+(delta),
which no longer factorizes.
"""

import numpy as np

from dicke_fringe import (
    DensityMatrix4,
    SystemParams,
    directional_lowering,
    reduce_on_detection,
    sa_coherence,
    separability_witness,
    steady_state,
)
from dicke_fringe.detection import sa_coherence_closed_form

params = SystemParams.from_phi(1.0, np.pi / 2)
rho = steady_state(params)
print("steady state factorizes:", separability_witness(rho))

print("\ndelta      Im rho_sa (numeric)   closed form   product state?")
for delta in np.linspace(0, 2 * np.pi, 9):
    after = reduce_on_detection(rho, directional_lowering(params, delta))
    print(f"{delta:5.2f}   {sa_coherence(after):+.6f}           {sa_coherence_closed_form(params, delta):+.6f}"
          f"     {separability_witness(after)}")

# |ee> emits into the symmetric channel at delta = 0 and lands on the Bell state |s>
e = DensityMatrix4.basis_state("e", params.phi)
out = reduce_on_detection(e, directional_lowering(params, 0.0))
print("\n<s|rho|s> after a delta=0 click from |ee>:", round(out["ss"].real, 15))
