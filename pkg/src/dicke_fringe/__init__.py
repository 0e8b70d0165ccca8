"""Resonance fluorescence of two coherently driven, non-interacting two-level atoms."""

__version__ = "0.1.0"

from .errors import (
    BasisMismatchError,
    DegenerateDriveError,
    DickeFringeError,
    DomainError,
    InvalidGeometryError,
    InvalidStateError,
    NoPhotonError,
    SingularityError,
)
from .qcore import (
    Basis,
    DensityMatrix4,
    DetectionDirection,
    SymmetrizedBasis,
    SystemParams,
    delta_phase,
    pauli_ops,
    to_product,
    to_symmetrized,
)
from .dynamics import (
    ReducedState,
    SuperOp,
    assemble_liouvillian,
    propagate,
    reduced_rhs,
    steady_state,
    steady_state_closed_form,
    steady_state_numeric,
)
from .detection import (
    directional_lowering,
    reduce_on_detection,
    sa_coherence,
    separability_witness,
)
from .correlations import (
    classical_inequality_check,
    g1_intensity,
    g1_visibility,
    g2_analytic,
    g2_numeric,
    g2_zero_delay,
)
from .trajectories import (
    ClickRecord,
    coincidence_histogram,
    estimate_g2,
    simulate_trajectory,
)
