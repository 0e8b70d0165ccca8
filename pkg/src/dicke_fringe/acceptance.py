"""Exit criteria for the build, runnable from pytest or ``dicke-fringe check``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .correlations import (
    classical_inequality_check,
    g1_intensity,
    g1_visibility,
    g2_grid,
    g2_zero_delay,
    g2_zero_delay_by_reduction,
)
from .detection import directional_lowering, reduce_on_detection, sa_coherence
from .dynamics import (
    ReducedState,
    assemble_liouvillian,
    embed_reduced,
    reduce_state,
    reduced_rhs,
    steady_state,
    steady_state_closed_form,
    steady_state_numeric,
)
from .figures import FRINGE_DELTAS, fig4, fig5, fig6
from .qcore import DensityMatrix4, DetectionDirection, SystemParams, delta_phase, to_symmetrized, SymmetrizedBasis
from .trajectories import (
    DeltaWindow,
    coincidence_histogram,
    ensemble_density_matrix,
    expected_estimate,
    simulate_budget,
    simulate_ensemble,
)
from .dynamics import propagate

MC_BUDGET = 1e7
MC_SEED = 20240611
MC_ENSEMBLE = 2000


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    tolerance: str
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number:2d} {self.name}: {self.measured} (tolerance {self.tolerance}, {self.seconds:.1f}s)"


def _pops_numeric(omega: float) -> np.ndarray:
    rho = steady_state(SystemParams.from_phi(omega, 0.7))
    r = rho.entries.real
    return np.array([r[3, 3], r[1, 1], r[2, 2], r[0, 0]])


def c1_steady_state() -> tuple[bool, str, str]:
    dev = max(
        np.max(np.abs(np.array(steady_state_closed_form(SystemParams.from_phi(w))) - _pops_numeric(w)))
        for w in (0.05, 0.2, 0.8, 1.0, 3.0, 10.0, 50.0)
    )
    return dev < 1e-10, f"max |closed - kernel| = {dev:.2e}", "< 1e-10"


def c2_strong_field() -> tuple[bool, str, str]:
    pops = np.array(steady_state_closed_form(SystemParams.from_phi(1e3)))
    dev = np.max(np.abs(pops - 0.25))
    return dev < 1e-5, f"max |rho - 1/4| = {dev:.2e}", "< 1e-5"


def c3_reduced_embedding() -> tuple[bool, str, str]:
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        omega, phi = rng.uniform(0.05, 5.0), rng.uniform(0, 2 * np.pi)
        params = SystemParams.from_phi(omega, phi)
        L = assemble_liouvillian(params)
        state = ReducedState.from_array(rng.uniform(-0.3, 0.3, 9))
        full = DensityMatrix4(L.apply(embed_reduced(state, phi)))
        deriv = reduce_state(to_symmetrized(full, SymmetrizedBasis(phi)))
        worst = max(worst, np.max(np.abs(deriv.to_array() - reduced_rhs(state, params.alpha).to_array())))
    return worst < 1e-10, f"max residual = {worst:.2e}", "< 1e-10"


def c4_g2_equivalence() -> tuple[bool, str, str]:
    deltas = np.linspace(0.0, 2 * np.pi, 21, endpoint=False)
    ts = np.linspace(0.0, 6.0, 13)
    worst = 0.0
    for omega in (0.2, 0.8, 3.0):
        a = g2_grid(omega, deltas, deltas, ts, "analytic").values
        n = g2_grid(omega, deltas, deltas, ts, "numeric").values
        worst = max(worst, float(np.max(np.abs(a - n))))
    return worst < 1e-7, f"sup |analytic - regression| = {worst:.2e}", "< 1e-7"


def c5_zero_delay() -> tuple[bool, str, str]:
    rng = np.random.default_rng(5)
    ds = rng.uniform(0, 2 * np.pi, 50)
    zero_cf = max(g2_zero_delay(0.8, d, d + np.pi) for d in ds)
    zero_red = max(g2_zero_delay_by_reduction(0.8, d, d + np.pi) for d in ds)
    vals = {
        (0.0, 0.4832): (g2_zero_delay(0.8, 0, 0), g2_zero_delay_by_reduction(0.8, 0, 0)),
        (np.pi, 3.1729): (g2_zero_delay(0.8, np.pi, np.pi), g2_zero_delay_by_reduction(0.8, np.pi, np.pi)),
    }
    ok = zero_cf < 1e-12 and zero_red < 1e-12
    for (_, target), pair in vals.items():
        ok &= all(abs(v - target) <= 1e-4 for v in pair)
    g0, gpi = vals[(0.0, 0.4832)][0], vals[(np.pi, 3.1729)][0]
    msg = f"max g2(d,d+pi,0) = {max(zero_cf, zero_red):.1e}; g2(0,0,0) = {g0:.5f}; g2(pi,pi,0) = {gpi:.5f}"
    return ok, msg, "zeros < 1e-12, values +/- 1e-4"


def c6_nonclassical() -> tuple[bool, str, str]:
    res = classical_inequality_check(0.8, 0.0, np.pi)
    same = [classical_inequality_check(w, d, d) for w in (0.2, 0.8, 3.0) for d in np.linspace(0, 2 * np.pi, 25)]
    ok = res.violated and abs(res.lhs - (-1.123)) < 1e-3 and abs(res.rhs - 1.0) < 1e-12
    ok &= not any(r.violated for r in same)
    return ok, f"lhs = {res.lhs:.4f}, rhs = {res.rhs:.4f}, violated = {res.violated}", "lhs ~ -1.123 < rhs = 1"


def c7_entanglement() -> tuple[bool, str, str]:
    params = SystemParams.from_phi(1.0, np.pi / 2)
    rho = steady_state(params)
    after = reduce_on_detection(rho, directional_lowering(params, 0.0))
    im_sa = sa_coherence(after)
    # laser and detector both perpendicular to x12, so r_hat . x12 = 0
    geo = SystemParams(1.0, [0.0, 0.0, 1.0], [3.0, 0.0, 0.0])
    det = DetectionDirection.along([0.0, 1.0, 0.0])
    e_state = to_symmetrized(DensityMatrix4.basis_state("ee"), SymmetrizedBasis(geo.phi))
    out = reduce_on_detection(e_state, directional_lowering(geo, det))
    fid = out.entries[1, 1].real
    ok = abs(im_sa - 1.0 / 6.0) <= 1e-10 and fid >= 1 - 1e-12
    return ok, f"Im rho_sa = {im_sa:.6g} (target 1/6); <s|rho|s> after |e> = {fid:.15f}", "1e-10; 1e-12"


def c8_visibility() -> tuple[bool, str, str]:
    rho = steady_state(SystemParams.from_phi(1.0, 0.4))
    i0, ipi = g1_intensity(rho, 0.0), g1_intensity(rho, np.pi)
    v_num = (i0 - ipi) / (i0 + ipi)
    v1 = g1_visibility(SystemParams.from_phi(1.0))
    v_strong = g1_visibility(SystemParams.from_phi(1e3))
    ok = abs(v_num - 1 / 3) <= 1e-10 and abs(v1 - 1 / 3) <= 1e-10 and v_strong < 1e-5
    return ok, f"V(1) = {v_num:.12f}, V(1e3) = {v_strong:.2e}", "1/3 +/- 1e-10; < 1e-5"


def c9_monte_carlo(budget: float = MC_BUDGET, seed: int = MC_SEED, workers: int = 1) -> tuple[bool, str, str]:
    params = SystemParams.from_phi(0.8, 0.0)
    records = simulate_budget(params, budget, seed, workers=workers)
    zs = []
    for d1 in (0.0, np.pi):
        for d2 in (0.0, np.pi):
            for lo in (0.0, 1.0):
                w1, w2 = DeltaWindow(d1, 0.1), DeltaWindow(d2, 0.1)
                h = coincidence_histogram(records, w1, w2, [lo, lo + 0.05], t_min=20.0)
                e = expected_estimate(params, w1, w2, lo, lo + 0.05)
                zs.append(float((h.estimate[0] - e) / h.stderr[0]))
    ens = simulate_ensemble(SystemParams.from_phi(0.8, 0.3), 5.0, MC_ENSEMBLE, seed + 1)
    mean, se = ensemble_density_matrix(ens)
    L = assemble_liouvillian(SystemParams.from_phi(0.8, 0.3))
    ref = propagate(L, DensityMatrix4.basis_state("gg"), 5.0).entries
    dev = np.concatenate([(mean - ref).real.ravel(), (mean - ref).imag.ravel()])
    sig = np.concatenate([se.real.ravel(), se.imag.ravel()])
    exact = sig < 1e-12  # e.g. imaginary parts of diagonal entries
    z_state = np.abs(dev[~exact]) / sig[~exact]
    ok = max(abs(z) for z in zs) <= 3 and np.all(z_state <= 3) and np.all(np.abs(dev[exact]) < 1e-10)
    return ok, f"max |z| g2 = {max(abs(z) for z in zs):.2f}, max |z| state = {z_state.max():.2f}", "3 sigma"


def c10_figures() -> tuple[bool, str, str]:
    d = FRINGE_DELTAS
    n_pi = np.round(d / np.pi).astype(int)
    on_grid = np.abs(d - n_pi * np.pi) < 1e-9
    odd, even = on_grid & (n_pi % 2 == 1), on_grid & (n_pi % 2 == 0)

    single = fig4()["value"]
    inner = np.arange(1, len(d) - 1)
    local_max = inner[(single[inner] > single[inner - 1]) & (single[inner] > single[inner + 1])]
    local_min = inner[(single[inner] < single[inner - 1]) & (single[inner] < single[inner + 1])]
    ok = set(local_max) == set(np.flatnonzero(odd)) and all(single[local_max] > 1)
    ok &= set(local_min) == set(np.flatnonzero(even)[1:-1]) and all(single[even] < 1)

    p0, ppi = fig5()["value"], fig6()["value"]
    ok &= bool(np.all(p0[odd] < 1e-12) and np.all(p0[~odd] > 1e-6))
    ok &= bool(np.all(ppi[even] < 1e-12) and np.all(ppi[~even] > 1e-6))
    msg = (f"fig4 max {single.max():.4f} at {d[single.argmax()] / np.pi:.2f} pi, min {single.min():.4f}; "
           f"fig5 zeros {np.sum(p0 < 1e-12)}; fig6 zeros {np.sum(ppi < 1e-12)}")
    return ok, msg, "argmax/argmin/zero locations exact on grid"


CRITERIA: list[tuple[int, str, Callable, bool]] = [
    (1, "steady state closed form vs kernel", c1_steady_state, False),
    (2, "strong-field populations", c2_strong_field, False),
    (3, "reduced ODE embedding", c3_reduced_embedding, False),
    (4, "analytic vs regression g2", c4_g2_equivalence, False),
    (5, "zero-delay structure", c5_zero_delay, False),
    (6, "classical inequality violated", c6_nonclassical, False),
    (7, "detection-induced entanglement", c7_entanglement, False),
    (8, "fringe visibility", c8_visibility, False),
    (9, "Monte Carlo consistency", c9_monte_carlo, True),
    (10, "figure features", c10_figures, False),
]


def run_criterion(number: int, **kwargs) -> CriterionResult:
    num, name, fn, _ = next(c for c in CRITERIA if c[0] == number)
    start = time.perf_counter()
    try:
        ok, measured, tol = fn(**kwargs)
    except Exception as exc:  # a crash is a failed criterion, not a crashed report
        ok, measured, tol = False, f"error: {exc!r}", "-"
    return CriterionResult(num, name, bool(ok), measured, tol, time.perf_counter() - start)


def run_all(fast: bool = False, mc_budget: float = MC_BUDGET, seed: int = MC_SEED,
            workers: int = 1) -> list[CriterionResult]:
    out = []
    for num, _, _, is_mc in CRITERIA:
        if is_mc and fast:
            continue
        kwargs = {"budget": mc_budget, "seed": seed, "workers": workers} if is_mc else {}
        out.append(run_criterion(num, **kwargs))
    return out
