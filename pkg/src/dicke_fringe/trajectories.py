"""Quantum-jump Monte Carlo unraveling with direction-resolved clicks.

Each click is labelled by a detection phase delta drawn from the family
sqrt(2 gamma) sigma-(delta), delta uniform on [0, 2 pi). Averaged over delta this
family reproduces the single-atom dissipators exactly, so the ensemble of
trajectories unravels the same master equation used elsewhere.

Jump times come from the norm-threshold method. The first time the norm of
the unnormalized state falls below a uniform threshold is located by binary
search on a dyadic grid of width ``TIME_RESOLUTION``, with exact
matrix-exponential steps. Exponentials are used instead of an
eigendecomposition because the effective Hamiltonian is defective at
Omega = gamma/2.

Seeding rule: trajectory ``i`` of an ensemble with master seed ``seed`` draws
from ``numpy.random.SeedSequence(seed, spawn_key=(i,))``. That is the i-th child
of ``SeedSequence(seed).spawn``. Results therefore do not depend on how
trajectories are batched or distributed over workers.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np
import scipy.linalg

from .correlations import CorrelationGrid, g2_analytic
from .dynamics import hamiltonian
from .qcore import TWO_PI, SystemParams, pauli_ops

TIME_RESOLUTION = 2.0**-27  # ~7.5e-9 in units of 1/gamma
DELTA_ITERATIONS = 64
DELTA_TOL = 1e-13
RNG_BLOCK = 4096  # must stay even: uniforms are consumed in pairs
GROUND = np.array([0, 0, 0, 1], dtype=complex)
CHUNK_SIZE = 256


@dataclass(frozen=True)
class ClickRecord:
    times: np.ndarray
    deltas: np.ndarray
    seed: tuple
    duration: float
    omega: float = float("nan")
    phi: float = 0.0
    final_state: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        d = np.asarray(self.deltas, dtype=float)
        if t.shape != d.shape:
            raise ValueError("times and deltas differ in length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("click times must be strictly increasing")
        if np.any((d < 0) | (d >= TWO_PI)):
            raise ValueError("click phases must lie in [0, 2 pi)")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "deltas", d)

    def __len__(self):
        return len(self.times)


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _seed_label(ss: np.random.SeedSequence) -> tuple:
    return (ss.entropy, *ss.spawn_key)


@numba.njit(cache=True)
def _matvec4(m, v, out):
    for i in range(4):
        out[i] = m[i, 0] * v[0] + m[i, 1] * v[1] + m[i, 2] * v[2] + m[i, 3] * v[3]


@numba.njit(cache=True)
def _norm2(v):
    acc = 0.0
    for i in range(4):
        acc += v[i].real * v[i].real + v[i].imag * v[i].imag
    return acc


@numba.njit(cache=True)
def _sample_delta(v, phi, u):
    """Inverse-CDF sample of p(d) = (A + B cos d + C sin d) / (2 pi A).

    Newton on the closed-form CDF, falling back to bisection whenever a step
    leaves the bracket.
    """
    nrm = _norm2(v)
    a = (2.0 * abs(v[0]) ** 2 + abs(v[1]) ** 2 + abs(v[2]) ** 2) / nrm
    # <sigma+_1 sigma-_2> = conj(psi_eg) psi_ge, rotated by the laser phase
    w = np.conj(v[1]) * v[2] / nrm * np.exp(-2j * phi)
    b, c = 2.0 * w.real, -2.0 * w.imag
    target = u * TWO_PI * a
    lo, hi = 0.0, TWO_PI
    d = u * TWO_PI
    for _ in range(DELTA_ITERATIONS):
        sd, cd = np.sin(d), np.cos(d)
        f = a * d + b * sd + c * (1.0 - cd) - target
        if f < 0.0:
            lo = d
        else:
            hi = d
        if hi - lo < DELTA_TOL:
            break
        fp = a + b * cd + c * sd
        nxt = d - f / fp if fp > 0.0 else lo - 1.0
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - d) < DELTA_TOL:
            d = nxt
            break
        d = nxt
    return 0.0 if d >= TWO_PI else d


@numba.njit(cache=True)
def _evolve(psi, t, duration, u, props, steps, h_eff, phi, out_t, out_d):
    """Advance one trajectory, consuming uniforms in (threshold, phase) pairs.

    Returns (t, uniforms used, clicks written, finished). ``psi`` is updated
    in place.
    """
    n_lvl = len(steps)
    h0 = steps[n_lvl - 1]
    cur = np.empty(4, dtype=np.complex128)
    trial = np.empty(4, dtype=np.complex128)
    k = 0
    nc = 0
    while k + 2 <= len(u):
        thresh = 1.0 - u[k]
        k += 1
        remaining = duration - t
        tau = 0.0
        cur[:] = psi
        for lvl in range(n_lvl):
            if tau + steps[lvl] <= remaining:
                _matvec4(props[lvl], cur, trial)
                if _norm2(trial) > thresh:
                    cur[:] = trial
                    tau += steps[lvl]
        if tau + h0 > remaining:
            # no click before the end; close the sub-grid gap to first order
            _matvec4(h_eff, cur, trial)
            for i in range(4):
                cur[i] -= 1j * (remaining - tau) * trial[i]
            nrm = np.sqrt(_norm2(cur))
            for i in range(4):
                psi[i] = cur[i] / nrm
            return duration, k, nc, True
        _matvec4(props[n_lvl - 1], cur, trial)
        t = t + tau + h0
        d = _sample_delta(trial, phi, u[k])
        k += 1
        coef = np.exp(1j * (d - 2.0 * phi))
        # sigma-_1: |e?> -> |g?>; sigma-_2: |?e> -> |?g>
        cur[0] = 0.0
        cur[1] = coef * trial[0]
        cur[2] = trial[0]
        cur[3] = trial[1] + coef * trial[2]
        nrm = np.sqrt(_norm2(cur))
        for i in range(4):
            psi[i] = cur[i] / nrm
        out_t[nc] = t
        out_d[nc] = d
        nc += 1
    return t, k, nc, False


class JumpEngine:
    """Precomputed no-jump propagators for a fixed parameter set."""

    def __init__(self, params: SystemParams, max_duration: float):
        ops = pauli_ops()
        self.params = params
        self.phi = params.phi
        self.h_eff = hamiltonian(params) - 1j * params.gamma * (ops.n1 + ops.n2)
        n_levels = max(1, math.ceil(math.log2(max(max_duration, 1.0) / TIME_RESOLUTION)) + 1)
        self.steps = np.array([TIME_RESOLUTION * 2.0**k for k in range(n_levels)][::-1])
        self.props = np.array([scipy.linalg.expm(-1j * self.h_eff * h) for h in self.steps])

    def run_one(self, seq: np.random.SeedSequence, duration: float, psi0=None) -> ClickRecord:
        rng = np.random.Generator(np.random.PCG64(seq))
        psi = np.array(GROUND if psi0 is None else psi0, dtype=complex)
        psi /= np.linalg.norm(psi)
        t = 0.0
        times, deltas = [], []
        out_t, out_d = np.empty(RNG_BLOCK // 2), np.empty(RNG_BLOCK // 2)
        finished = False
        while not finished:
            u = rng.random(RNG_BLOCK)
            t, _, nc, finished = _evolve(psi, t, duration, u, self.props, self.steps,
                                         self.h_eff, self.phi, out_t, out_d)
            times.append(out_t[:nc].copy())
            deltas.append(out_d[:nc].copy())
        return ClickRecord(np.concatenate(times), np.concatenate(deltas), _seed_label(seq),
                           float(duration), self.params.omega, self.phi, psi)

    def run(self, seqs, duration: float, psi0=None) -> list[ClickRecord]:
        return [self.run_one(ss, duration, psi0) for ss in seqs]


def simulate_trajectory(params: SystemParams, duration: float, seed, psi0=None) -> ClickRecord:
    """One trajectory starting from ``psi0`` (default |gg>)."""
    if duration <= 0:
        raise ValueError("duration must be > 0")
    engine = JumpEngine(params, duration)
    return engine.run([_seed_sequence(seed)], duration, psi0)[0]


def _run_chunk(args):
    params, duration, seqs, psi0 = args
    return JumpEngine(params, duration).run(seqs, duration, psi0)


def simulate_ensemble(params: SystemParams, duration: float, n_traj: int, seed,
                      workers: int = 1, psi0=None, chunk_size: int = CHUNK_SIZE) -> list[ClickRecord]:
    """``n_traj`` independent trajectories; output independent of ``workers``."""
    if duration <= 0:
        raise ValueError("duration must be > 0")
    seqs = _seed_sequence(seed).spawn(n_traj)
    chunks = [(params, duration, seqs[i:i + chunk_size], psi0) for i in range(0, n_traj, chunk_size)]
    if workers <= 1:
        results = [_run_chunk(c) for c in chunks]
    else:
        with concurrent.futures.ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_chunk, chunks))
    return [rec for chunk in results for rec in chunk]


def ensemble_density_matrix(records: list[ClickRecord]) -> tuple[np.ndarray, np.ndarray]:
    """Mean of |psi><psi| over final states, with the elementwise standard error."""
    kets = np.array([r.final_state for r in records])
    outer = kets[:, :, None] * kets[:, None, :].conj()
    n = len(kets)
    mean = outer.mean(axis=0)
    se = (outer.real.std(axis=0, ddof=1) + 1j * outer.imag.std(axis=0, ddof=1)) / np.sqrt(n)
    return mean, se


# -- coincidence counting -----------------------------------------------------

@dataclass(frozen=True)
class DeltaWindow:
    """Detector acceptance: phases within ``halfwidth`` of ``center`` (circular)."""

    center: float
    halfwidth: float

    def __post_init__(self):
        if not 0 < self.halfwidth <= np.pi:
            raise ValueError("halfwidth must be in (0, pi]")

    def contains(self, deltas: np.ndarray) -> np.ndarray:
        d = np.mod(np.asarray(deltas) - self.center + np.pi, TWO_PI) - np.pi
        return np.abs(d) <= self.halfwidth


@dataclass(frozen=True)
class CoincidenceHistogram:
    tau_edges: np.ndarray
    win1: DeltaWindow
    win2: DeltaWindow
    counts: np.ndarray
    singles1: int
    singles2: int
    observation_time: float
    exposure: np.ndarray
    t_min: float

    @property
    def defined(self) -> np.ndarray:
        return (self.exposure > 0) & (self.singles2 > 0)

    @property
    def rate2(self) -> float:
        return self.singles2 / self.observation_time if self.observation_time > 0 else 0.0

    @property
    def estimate(self) -> np.ndarray:
        """g2 per tau bin; NaN marks undefined bins."""
        out = np.full(len(self.counts), np.nan)
        ok = self.defined
        out[ok] = self.counts[ok] / (self.rate2 * self.exposure[ok])
        return out

    @property
    def stderr(self) -> np.ndarray:
        """Poisson error on the pair count; empty bins use one count."""
        out = np.full(len(self.counts), np.nan)
        ok = self.defined
        out[ok] = np.sqrt(np.maximum(self.counts[ok], 1)) / (self.rate2 * self.exposure[ok])
        return out

    @property
    def tau_centers(self) -> np.ndarray:
        return 0.5 * (self.tau_edges[1:] + self.tau_edges[:-1])


def coincidence_histogram(records, win1: DeltaWindow, win2: DeltaWindow, tau_edges,
                          t_min: float = 0.0) -> CoincidenceHistogram:
    """Count ordered click pairs (win1 at t, win2 at t + tau), tau bins (lo, hi].

    Pairs are normalized by the rate in ``win2`` times the exposure of each
    bin, with edge effects at the end of each record handled exactly. Clicks
    before ``t_min`` are dropped.
    """
    edges = np.asarray(tau_edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0) or edges[0] < 0:
        raise ValueError("tau_edges must be increasing, non-negative, length >= 2")
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    exposure = np.zeros(len(edges) - 1)
    n1 = n2 = 0
    obs = 0.0
    for rec in records:
        if rec.duration <= t_min:
            continue
        keep = rec.times >= t_min
        t, d = rec.times[keep], rec.deltas[keep]
        t1, t2 = t[win1.contains(d)], t[win2.contains(d)]
        n1 += len(t1)
        n2 += len(t2)
        obs += rec.duration - t_min
        if len(t1) == 0:
            continue
        pos = np.searchsorted(t2, t1[:, None] + edges[None, :], side="right")
        counts += np.diff(pos, axis=1).sum(axis=0)
        lo = np.minimum(t1[:, None] + edges[None, :-1], rec.duration)
        hi = np.minimum(t1[:, None] + edges[None, 1:], rec.duration)
        exposure += (hi - lo).sum(axis=0)
    return CoincidenceHistogram(edges, win1, win2, counts, n1, n2, obs, exposure, t_min)


def expected_estimate(params: SystemParams, win1: DeltaWindow, win2: DeltaWindow,
                      tau_lo: float, tau_hi: float, order: int = 24) -> float:
    """What the histogram estimator converges to: the closed-form g2 averaged
    over both windows (weighted by the single-detector intensity) and the bin."""
    x, w = np.polynomial.legendre.leggauss(order)
    s = params.s

    def nodes(win):
        d = win.center + win.halfwidth * x
        wt = w * (s + np.cos(d))
        return d, wt / wt.sum()

    d1, w1 = nodes(win1)
    d2, w2 = nodes(win2)
    tt = 0.5 * (tau_lo + tau_hi) + 0.5 * (tau_hi - tau_lo) * x
    vals = g2_analytic(params, d1[:, None, None], d2[None, :, None], tt[None, None, :])
    return float(np.einsum("i,j,k,ijk->", w1, w2, 0.5 * w, vals))


@dataclass(frozen=True)
class MCEstimate:
    grid: CorrelationGrid
    histogram: CoincidenceHistogram
    records: list = field(repr=False, compare=False, default_factory=list)


def estimate_g2(params: SystemParams, delta1: float, delta2: float, tau_edges, budget: float,
                seed, halfwidth: float = 0.1, traj_duration: float = 2000.0,
                burn_in: float = 20.0, workers: int = 1, records=None) -> MCEstimate:
    """Monte Carlo g2 with per-bin standard errors.

    ``budget`` is the total simulated time, split into trajectories of
    ``traj_duration`` (a short final trajectory takes the remainder).
    Pass ``records`` to reuse an existing ensemble.
    """
    if budget <= 0 and records is None:
        raise ValueError("budget must be > 0")
    if records is None:
        records = simulate_budget(params, budget, seed, traj_duration, burn_in, workers)
    hist = coincidence_histogram(records, DeltaWindow(delta1, halfwidth), DeltaWindow(delta2, halfwidth),
                                 tau_edges, t_min=burn_in)
    grid = CorrelationGrid(np.array([delta1]), np.array([delta2]), hist.tau_centers,
                           hist.estimate[None, None, :], params.omega, "montecarlo",
                           stderr=hist.stderr[None, None, :])
    return MCEstimate(grid, hist, records)


def simulate_budget(params: SystemParams, budget: float, seed, traj_duration: float = 2000.0,
                    burn_in: float = 20.0, workers: int = 1) -> list[ClickRecord]:
    """Trajectories whose post-burn-in time adds up to ``budget``."""
    useful = traj_duration - burn_in
    if useful <= 0:
        raise ValueError("traj_duration must exceed burn_in")
    n = max(1, math.ceil(budget / useful))
    duration = burn_in + budget / n
    return simulate_ensemble(params, duration, n, seed, workers=workers)


# -- export ---------------------------------------------------------------------

def write_click_record(path, record: ClickRecord, version: str | None = None) -> None:
    from . import __version__

    lines = [
        f"# dicke-fringe v{version or __version__}",
        f"# omega={record.omega!r}",
        f"# phi={record.phi!r}",
        f"# seed={','.join(str(x) for x in record.seed)}",
        f"# duration={record.duration!r}",
        "# t_k\tdelta_k",
    ]
    lines += [f"{t:.12g}\t{d:.12g}" for t, d in zip(record.times, record.deltas)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_click_record(path) -> ClickRecord:
    meta, rows = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = val.strip()
        elif line.strip():
            t, d = line.split("\t")
            rows.append((float(t), float(d)))
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    seed = tuple(int(x) for x in meta.get("seed", "").split(",") if x)
    return ClickRecord(arr[:, 0], arr[:, 1], seed, float(meta["duration"]),
                       float(meta.get("omega", "nan")), float(meta.get("phi", "0")))
