"""Per-sector eigensystem of the generator and spectral propagation.

At zero detuning (and g = 1) the printed-mode block generator has a
known closed-form eigensystem: four eigenvalues built from square roots
of rate combinations, and left/right eigenmatrices rho_check_j /
rho_hat_j normalized to the biorthonormality trace(rho_check_j @
rho_hat_k) = delta_jk.  Away from that regime, or whenever a closed-form
denominator degenerates, the numerical eigensolver takes over.

Left eigenmatrices are stored with shape (dim_right, dim_left) so the
pairing trace(left @ right) is a plain matrix product for square and
reduced sectors alike; equivalently, the row vector acting on the
vectorized generator is ``left.T.reshape(-1)``.

Eigenvalue branch convention: every radicand here is real, and the
square root of a negative real is taken as +i sqrt(|.|).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .liouville import (
    CANONICAL,
    PRINTED,
    BlockIndex,
    _check_index,
    _printed_full,
    devectorize,
    liouvillian_block,
)
from .model import ModelParams

CLOSED_FORM = "closed_form"
NUMERICAL = "numerical"

# Closed-form denominators (and pairwise eigenvalue gaps) smaller than this
# trigger the numerical fallback.
DENOMINATOR_FLOOR = 1e-8

# Right-eigenvector matrices with a condition number above this are treated
# as numerically non-diagonalizable: a defective (exceptional-point) block
# perturbs its eigenvalues by ~sqrt(machine eps), which can exceed the plain
# gap threshold, but its eigenbasis conditioning always explodes.
CONDITION_LIMIT = 1e7


class PreconditionViolated(ValueError):
    """Closed form requested outside its domain (detuning, g, or n/m = 0)."""


class FallbackRequired(Exception):
    """Closed-form eigenvectors degenerate here; use the numerical path."""


class DegenerateBlock(Exception):
    """Spectral propagation is invalid on a degenerate (non-diagonalizable) block."""


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues and biorthonormal eigenmatrices of one sector generator.

    For ``source == "closed_form"`` the eigenvalues keep their closed-form
    labels (1..4); for the numerical source they follow the documented
    sort (descending real part, then ascending imaginary part).
    ``right[j]`` has the block shape, ``left[j]`` the transposed shape, and
    trace(left[j] @ right[k]) = delta_jk whenever ``degenerate`` is False.
    """

    index: BlockIndex
    mode: str
    source: str
    eigenvalues: np.ndarray
    right: tuple
    left: tuple
    degenerate: bool


def _branch_sqrt(x):
    """Principal square root of a real number; +i sqrt(|x|) for x < 0."""
    if x >= 0:
        return complex(math.sqrt(x))
    return 1j * math.sqrt(-x)


def _closed_eigenvalues(n, m, g0, g1, gamma_sum):
    smn = math.sqrt(n * m)
    q = smn * gamma_sum / 4.0
    rad = q * q
    d12 = _branch_sqrt(rad - (math.sqrt(m) + math.sqrt(n)) ** 2)
    d34 = _branch_sqrt(rad - (math.sqrt(m) - math.sqrt(n)) ** 2)
    return np.array([-3.0 * q - d12, -3.0 * q + d12, -q - d34, -q + d34])


def _require_closed_domain(index, p):
    if p.delta != 0.0 or p.g != 1.0:
        raise PreconditionViolated(
            "closed forms hold only at zero detuning with unit coupling")
    if index.n < 1 or index.m < 1:
        raise PreconditionViolated(
            "closed forms cover full sectors only (n, m >= 1)")


def closed_eigenvalues(index, p: ModelParams) -> np.ndarray:
    """The four closed-form eigenvalues of the printed block, labels 1..4.

    On diagonal sectors the fourth eigenvalue is exactly zero (the
    stationary mode); labels 1 and 2 carry the fast 3/4-rate damping.
    """
    index = _check_index(index)
    _require_closed_domain(index, p)
    return _closed_eigenvalues(index.n, index.m, p.gamma0, p.gamma1, p.gamma_sum)


def _shifted_eigenvalues(lam, n, m, gamma_sum):
    # Eigenvalues shifted by half the geometric-mean damping; the natural
    # variable of the closed-form eigenvector entries.
    return lam + math.sqrt(n * m) * gamma_sum / 2.0


def closed_eigenvectors(index, p: ModelParams):
    """Closed-form (left, right) eigenmatrix quadruples for the printed block.

    Raises FallbackRequired whenever the spectrum degenerates or any
    denominator comes within DENOMINATOR_FLOOR of zero; callers switch to
    the numerical source.  Lefts are returned renormalized so that
    trace(left_j @ right_j) = 1 even though the closed forms already
    satisfy it, as a guard against conditioning loss.
    """
    index = _check_index(index)
    _require_closed_domain(index, p)
    n, m = index
    g0, g1 = p.gamma0, p.gamma1
    gt = p.gamma_sum
    sn, sm = math.sqrt(n), math.sqrt(m)
    lam = _closed_eigenvalues(n, m, g0, g1, gt)
    el = _shifted_eigenvalues(lam, n, m, gt)
    l1, l2 = el[0], el[1]
    lam3, lam4 = lam[2], lam[3]

    gaps = [abs(lam[i] - lam[j]) for i in range(4) for j in range(i + 1, 4)]
    denominators = [l2 - l1, lam3 - lam4, l2,
                    4 + l1 * gt, 4 + l2 * gt, 4 - lam3 * gt, 4 - lam4 * gt, lam3]
    if n != m:
        denominators.append(sm - sn)
    if min(gaps) < DENOMINATOR_FLOOR or min(abs(d) for d in denominators) < DENOMINATOR_FLOOR:
        raise FallbackRequired(f"degenerate closed form on sector {tuple(index)}")

    s = sm + sn
    d = sm - sn

    right1 = np.array([[1j * s, -l2], [l2, -1j * s]]) / (l2 - l1)
    right2 = np.array([[-l2, -1j * s], [1j * s, l2]]) / (l2 - l1)
    right3 = np.array([[1j * (2 - g1 * lam4) * d, -(n * g0 + m * g1 + 2 * lam4)],
                       [-(m * g0 + n * g1 + 2 * lam4), 1j * (2 - g0 * lam4) * d]]
                      ) / (lam3 * (4 - lam4 * gt))
    if n == m:
        den = 8 + n * gt * gt
        right4 = np.array([[4 + n * gt * g1, -2j * sn * (g0 - g1)],
                           [2j * sn * (g0 - g1), 4 + n * gt * g0]]) / den
    else:
        den = 4 - lam3 * gt
        right4 = np.array([[(2 - g1 * lam3), 1j * (n * g0 + m * g1 + 2 * lam3) / d],
                           [1j * (m * g0 + n * g1 + 2 * lam3) / d, (2 - g0 * lam3)]]) / den

    den = l2 * (4 + l1 * gt)
    left1 = np.array([[1j * (2 + g0 * l1) * s, (n * g0 + m * g1 - 2 * l1)],
                      [-(m * g0 + n * g1 - 2 * l1), -1j * (2 + g1 * l1) * s]]) / den
    den = 4 + l2 * gt
    left2 = np.array([[-(2 + g0 * l2), 1j * (n * g0 + m * g1 - 2 * l2) / s],
                      [-1j * (m * g0 + n * g1 - 2 * l2) / s, (2 + g1 * l2)]]) / den
    den = lam3 - lam4
    left3 = np.array([[1j * d, lam3], [lam3, 1j * d]]) / den
    left4 = np.array([[lam3, -1j * d], [-1j * d, lam3]]) / den

    rights = [right1, right2, right3, right4]
    lefts = [lft / np.trace(lft @ rgt) for lft, rgt in zip([left1, left2, left3, left4], rights)]
    return lefts, rights


@lru_cache(maxsize=512)
def spectral_decomposition(index, p: ModelParams, mode=CANONICAL,
                           source="auto") -> SpectralDecomposition:
    """Eigensystem of one sector generator, closed-form where available.

    Dispatch for ``source="auto"``: the closed form is used when the mode
    is printed, detuning is zero, g = 1, both excitation numbers are >= 1,
    and no degeneracy forces a fallback; otherwise the numerical solver.
    Results are cached per (index, params, mode, source); treat the
    returned arrays as read-only.
    """
    index = _check_index(index)
    if source not in ("auto", CLOSED_FORM, NUMERICAL):
        raise ValueError(f"unknown source {source!r}")

    closed_ok = (mode == PRINTED and p.delta == 0.0 and p.g == 1.0
                 and index.n >= 1 and index.m >= 1)
    if source == CLOSED_FORM and not closed_ok:
        _require_closed_domain(index, p)   # raises with the precise reason
        raise PreconditionViolated("closed form is defined for printed mode only")

    if source in ("auto", CLOSED_FORM) and closed_ok:
        try:
            lefts, rights = closed_eigenvectors(index, p)
        except FallbackRequired:
            if source == CLOSED_FORM:
                raise
        else:
            return SpectralDecomposition(
                index=index, mode=mode, source=CLOSED_FORM,
                eigenvalues=closed_eigenvalues(index, p),
                right=tuple(rights), left=tuple(lefts), degenerate=False)

    block = liouvillian_block(index, p, mode)
    es = linalg.eig_general(block.matrix)
    degenerate = es.degenerate or es.condition > CONDITION_LIMIT
    # On diagonal sectors the two modes coincide, so the exact closed-form
    # gaps diagnose degeneracy more sharply than the perturbed numerics.
    if (not degenerate and p.delta == 0.0 and p.g == 1.0
            and index.n >= 1 and index.m >= 1
            and (mode == PRINTED or index.n == index.m)):
        lam = _closed_eigenvalues(index.n, index.m, p.gamma0, p.gamma1, p.gamma_sum)
        gap = min(abs(lam[i] - lam[j]) for i in range(4) for j in range(i + 1, 4))
        degenerate = bool(
            gap < linalg.DEGENERACY_RTOL * (1.0 + np.linalg.norm(block.matrix)))
    rights = tuple(devectorize(es.right[:, j], index) for j in range(index.dim))
    lefts = tuple(es.left[j].reshape(index.dim_left, index.dim_right).T
                  for j in range(index.dim))
    if not degenerate:
        lefts = tuple(lft / np.trace(lft @ rgt) for lft, rgt in zip(lefts, rights))
    return SpectralDecomposition(
        index=index, mode=mode, source=NUMERICAL, eigenvalues=es.values,
        right=rights, left=lefts, degenerate=degenerate)


def expansion_coefficients(dec: SpectralDecomposition, block0) -> np.ndarray:
    """c_j = trace(left_j @ block0): the weights of block0 in the eigenbasis."""
    block0 = np.asarray(block0, dtype=complex)
    return np.array([np.trace(lft @ block0) for lft in dec.left])


def propagate_block(dec: SpectralDecomposition, block0, t) -> np.ndarray:
    """Evolve one block by the spectral sum sum_j c_j exp(lambda_j t) right_j."""
    if dec.degenerate:
        raise DegenerateBlock(
            f"sector {tuple(dec.index)} is degenerate; use the exponential path")
    coeff = expansion_coefficients(dec, block0)
    weights = coeff * np.exp(dec.eigenvalues * t)
    return np.tensordot(weights, np.stack(dec.right), axes=(0, 0))


def propagate_block_grid(dec: SpectralDecomposition, block0, times) -> np.ndarray:
    """propagate_block evaluated on a whole time grid, shape (T, dl, dr)."""
    if dec.degenerate:
        raise DegenerateBlock(
            f"sector {tuple(dec.index)} is degenerate; use the exponential path")
    coeff = expansion_coefficients(dec, block0)
    times = np.asarray(times, dtype=float)
    weights = coeff[None, :] * np.exp(np.outer(times, dec.eigenvalues))
    return np.tensordot(weights, np.stack(dec.right), axes=(1, 0))


def match_eigenvalues(reference, candidates):
    """Pair each reference eigenvalue with the nearest unused candidate.

    Greedy nearest-in-complex-plane assignment in reference order; returns
    the permutation of ``candidates``.  Used to compare closed-form labels
    against numerically sorted spectra.
    """
    reference = np.asarray(reference)
    candidates = np.asarray(candidates)
    if reference.shape != candidates.shape:
        raise ValueError("eigenvalue sets must have equal length")
    unused = list(range(len(candidates)))
    perm = []
    for ref in reference:
        k = min(unused, key=lambda i: abs(candidates[i] - ref))
        unused.remove(k)
        perm.append(k)
    return candidates[perm]


def trace_consistency_report(index, p: ModelParams) -> dict:
    """Eigenvalue sum vs matrix trace, under both rate-combination conventions.

    The generator's coherence damping uses a combined rate that could read
    either gamma0 + gamma1 or gamma1 - gamma0.  Only the sum convention
    makes the trace of the printed block equal the sum of its closed-form
    eigenvalues; this report exposes both so the pinning stays testable.
    The "active" entry runs the same comparison through the package's live
    code paths (ModelParams.gamma_sum and the printed block builder), so a
    convention regression anywhere shows up here.  Requires the closed-form
    domain (delta = 0, g = 1, n, m >= 1).
    """
    index = _check_index(index)
    _require_closed_domain(index, p)
    out = {}
    for name, gt in (("sum", p.gamma0 + p.gamma1),
                     ("difference", p.gamma1 - p.gamma0)):
        lam = _closed_eigenvalues(index.n, index.m, p.gamma0, p.gamma1, gt)
        trace = np.trace(_printed_full(index.n, index.m, p, gamma_sum=gt))
        out[name] = {
            "eigenvalue_sum": complex(lam.sum()),
            "matrix_trace": complex(trace),
            "mismatch": float(abs(lam.sum() - trace)),
        }
    live_sum = closed_eigenvalues(index, p).sum()
    live_trace = np.trace(liouvillian_block(index, p, PRINTED).matrix)
    out["active"] = {
        "eigenvalue_sum": complex(live_sum),
        "matrix_trace": complex(live_trace),
        "mismatch": float(abs(live_sum - live_trace)),
    }
    return out
