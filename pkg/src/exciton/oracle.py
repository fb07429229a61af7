"""Brute-force reference path on the truncated product space.

Everything here is built directly from the master equation's operators
(ladder matrices, atomic raising/lowering) on the full Fock x atom space,
never from the per-sector block formulas, so it can serve as an
independent check of the blocked machinery.  Propagation is a classical
fixed-step fourth-order Runge-Kutta integration with a step-halving
error estimate.

Basis order: |photons, atom> lexicographic with the atom index fastest,
so state (p, a) sits at row 2*p + a and the space has dimension
2*(n_max + 1).  Because both jump operators conserve the excitation
number, truncation is exact for any state supported below the cutoff.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import BlockedDensity
from .liouville import BlockIndex
from .model import ModelParams

DEFAULT_N_MAX = 8
MAX_N_MAX = 12

# A halving estimate above this aborts the run instead of returning drifted data.
STEP_ERROR_LIMIT = 1e-6


class TruncationTooLarge(ValueError):
    """Requested photon cutoff beyond the supported desk scale."""


class TruncationTooSmall(ValueError):
    """State has support above the photon cutoff."""


class StepTooLarge(RuntimeError):
    """Step-halving error estimate exceeded STEP_ERROR_LIMIT."""


@dataclass(frozen=True, eq=False)
class FullSuperoperator:
    """Dense generator matrix on the vectorized truncated space (canonical)."""

    matrix: np.ndarray
    n_max: int
    params: ModelParams


def state_index(photons, atom) -> int:
    return 2 * photons + atom


def space_dim(n_max) -> int:
    return 2 * (n_max + 1)


def sector_states(n, n_max):
    """Row indices of the excitation-n states present in the truncation,
    ordered (|n-1,1>, |n,0>)."""
    states = []
    if n >= 1 and n - 1 <= n_max:
        states.append(state_index(n - 1, 1))
    if n <= n_max:
        states.append(state_index(n, 0))
    return states


def _operators(n_max, p):
    a = np.diag(np.sqrt(np.arange(1.0, n_max + 1)), 1)
    eye_ph = np.eye(n_max + 1)
    sigma_plus = np.array([[0.0, 0.0], [1.0, 0.0]])
    A = np.kron(a, np.eye(2))
    SP = np.kron(eye_ph, sigma_plus)
    SM = np.kron(eye_ph, sigma_plus.T)
    SZ = np.kron(eye_ph, np.diag([-1.0, 1.0]))
    H = p.delta * SZ + p.g * (A @ SP + A.conj().T @ SM)
    jump0 = A.conj().T @ SM     # atom decays, photon added
    jump1 = A @ SP              # photon removed, atom excited
    return H.astype(complex), jump0.astype(complex), jump1.astype(complex)


def build_full_superoperator(p: ModelParams, n_max=DEFAULT_N_MAX) -> FullSuperoperator:
    """Matrix of rho -> -i[H,rho] + dissipators on the row-major vectorization."""
    if n_max > MAX_N_MAX:
        raise TruncationTooLarge(f"n_max={n_max} above the supported {MAX_N_MAX}")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    H, jump0, jump1 = _operators(n_max, p)
    eye = np.eye(space_dim(n_max), dtype=complex)
    sup = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for jump, rate in ((jump0, p.gamma0), (jump1, p.gamma1)):
        jdj = jump.conj().T @ jump
        sup += rate * np.kron(jump, jump.conj())
        sup -= 0.5 * rate * (np.kron(jdj, eye) + np.kron(eye, jdj.T))
    return FullSuperoperator(matrix=sup, n_max=n_max, params=p)


def extract_sector(sup: FullSuperoperator, index) -> np.ndarray:
    """Restriction of the full generator to the (n, m) sector, ordered like
    the vectorized block."""
    index = BlockIndex(*index)
    D = space_dim(sup.n_max)
    rows = sector_states(index.n, sup.n_max)
    cols = sector_states(index.m, sup.n_max)
    if not rows or not cols:
        raise TruncationTooSmall(f"sector {tuple(index)} is empty at n_max={sup.n_max}")
    idx = [r * D + c for r in rows for c in cols]
    return sup.matrix[np.ix_(idx, idx)]


def assemble(blocked: BlockedDensity, n_max=DEFAULT_N_MAX) -> np.ndarray:
    """Dense full-space density matrix from a blocked state."""
    if blocked.max_excitation > n_max:
        raise TruncationTooSmall(
            f"state reaches excitation {blocked.max_excitation}, above n_max={n_max}")
    D = space_dim(n_max)
    full = np.zeros((D, D), dtype=complex)
    for index, mat in blocked.items():
        rows = sector_states(index.n, n_max)
        cols = sector_states(index.m, n_max)
        full[np.ix_(rows, cols)] = mat
    return full


def disassemble(full: np.ndarray) -> BlockedDensity:
    """Blocked form of a full-space matrix; exact-zero sectors are dropped.

    The truncation edge (the lone state |n_max, 1> of excitation
    n_max + 1) cannot be represented as a block, so any support there
    raises TruncationTooSmall.
    """
    full = np.asarray(full, dtype=complex)
    D = full.shape[0]
    if full.shape != (D, D) or D % 2:
        raise ValueError(f"not a full-space matrix: shape {full.shape}")
    n_max = D // 2 - 1
    edge = state_index(n_max, 1)
    edge_mass = max(np.abs(full[edge, :]).max(), np.abs(full[:, edge]).max())
    if edge_mass > 1e-12:
        raise TruncationTooSmall(
            "support on the truncation edge; increase n_max")
    blocks = {}
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            sub = full[np.ix_(sector_states(n, n_max), sector_states(m, n_max))]
            if np.abs(sub).max() > 0.0:
                blocks[(n, m)] = sub
    return BlockedDensity(blocks)


@dataclass(frozen=True, eq=False)
class RK4Result:
    """Sampled full-space trajectory with integrator diagnostics.

    error_estimate is the largest sample deviation between the requested
    step and a halved step; trace_drift the largest |tr - tr(0)| along
    the requested-step run.
    """

    states: list
    dt: float
    error_estimate: float
    trace_drift: float


def rk4_step_bound(p: ModelParams, sup_matrix) -> float:
    """Default step: 0.01 / (g + gamma0 + gamma1 + |delta| + ||L||_2)."""
    norm = float(np.linalg.norm(sup_matrix, 2))
    return 0.01 / (p.g + p.gamma0 + p.gamma1 + abs(p.delta) + norm)


def rk4_stability_limit(sup_matrix) -> float:
    """Largest step we accept at all: 2.5 / ||L||_2, inside the classical
    RK4 stability region for every eigenvalue of the generator."""
    norm = float(np.linalg.norm(sup_matrix, 2))
    return math.inf if norm == 0.0 else 2.5 / norm


def _integrate(sup, v0, times, substeps):
    out = []
    v = v0.copy()
    prev = 0.0
    for t, nsub in zip(times, substeps):
        span = t - prev
        if nsub:
            h = span / nsub
            for _ in range(nsub):
                k1 = sup @ v
                k2 = sup @ (v + 0.5 * h * k1)
                k3 = sup @ (v + 0.5 * h * k2)
                k4 = sup @ (v + h * k3)
                v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(v.copy())
        prev = t
    return out


def rk4_evolve(rho0, sup: FullSuperoperator, times, dt=None) -> RK4Result:
    """Fixed-step RK4 integration of the full master equation.

    Sample times are hit exactly by subdividing each interval into an
    integer number of steps no longer than dt.  The default step comes
    from rk4_step_bound; an explicit dt is accepted up to the stability
    limit, with accuracy still policed by the halving estimate: the whole
    run is repeated at half the step, and StepTooLarge aborts when the
    worst sample deviation exceeds STEP_ERROR_LIMIT.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing and start at t >= 0")
    if dt is None:
        dt = rk4_step_bound(sup.params, sup.matrix)
    elif dt > rk4_stability_limit(sup.matrix):
        raise ValueError(
            f"dt={dt:.3g} above the stability limit "
            f"{rk4_stability_limit(sup.matrix):.3g}")

    spans = np.diff(np.concatenate(([0.0], times)))
    substeps = [int(math.ceil(span / dt)) if span > 0 else 0 for span in spans]

    v0 = np.asarray(rho0, dtype=complex).reshape(-1)
    coarse = _integrate(sup.matrix, v0, times, substeps)
    fine = _integrate(sup.matrix, v0, times, [2 * s for s in substeps])
    error = max((float(np.abs(a - b).max()) for a, b in zip(coarse, fine)),
                default=0.0)
    if error > STEP_ERROR_LIMIT:
        raise StepTooLarge(f"halving estimate {error:.3g} above {STEP_ERROR_LIMIT}")

    D = space_dim(sup.n_max)
    states = [v.reshape(D, D) for v in coarse]
    trace0 = np.trace(v0.reshape(D, D))
    drift = max(float(abs(np.trace(s) - trace0)) for s in states)
    return RK4Result(states=states, dt=float(dt), error_estimate=error,
                     trace_drift=drift)
