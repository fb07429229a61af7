"""Dense complex linear algebra for the small generator blocks.

Everything in this package lives on matrices of dimension four or less
(the vectorized two-by-two sectors), plus one dense path of arbitrary
dimension used by the brute-force reference integrator.  The routines
here wrap LAPACK (via numpy/scipy) behind the contracts the rest of the
package relies on: a biorthonormal left/right eigensystem with an
explicit degeneracy flag, a guarded matrix exponential, and a linear
solve that refuses to silently invert a singular matrix.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

# Pairwise eigenvalue gaps below DEGENERACY_RTOL * (1 + ||M||_F) mark the
# eigensystem as degenerate (non-diagonalizable or numerically unresolvable).
DEGENERACY_RTOL = 1e-8

# Relative pivot threshold below which a linear system counts as singular.
SINGULAR_PIVOT_RTOL = 1e-12

# exp(M t) is refused when ||M t||_1 exceeds this; exp(700) is near the
# largest finite double, so anything bigger would overflow silently.
EXPM_NORM_BOUND = 700.0


class SingularMatrix(ValueError):
    """Linear solve hit a pivot too small to trust."""


class ExpmOverflow(OverflowError):
    """||M t|| is large enough that exp(M t) would overflow doubles."""


@dataclass(frozen=True)
class EigSystem:
    """Eigenvalues with biorthonormal right/left eigenvectors.

    values : (d,) complex, sorted by descending real part, then ascending
        imaginary part.
    right : (d, d) complex, right eigenvectors as columns.
    left : (d, d) complex, left row vectors; ``left[i] @ M = values[i] * left[i]``
        and ``left @ right == I`` whenever ``degenerate`` is False.
    degenerate : some pair of eigenvalues is closer than
        ``DEGENERACY_RTOL * (1 + ||M||_F)``; the left set is then only a
        best-effort pseudo-inverse and biorthonormality is not guaranteed.
    condition : 2-norm condition number of the right eigenvector matrix.
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    degenerate: bool
    condition: float


def _check_square(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix contains non-finite entries")
    return m


def sort_key(values):
    """Index order for the documented eigenvalue sort."""
    return np.lexsort((values.imag, -values.real))


def eig_general(m) -> EigSystem:
    """Full spectral decomposition of a general complex square matrix.

    Tuned for the package's blocks (dimension <= 4) but valid at any
    dimension.  Left row vectors are taken from the inverse of the right
    eigenvector matrix, which makes ``left @ right = I`` exact up to
    conditioning and turns each row into a left eigenvector of ``m``.
    """
    m = _check_square(m)
    values, right = np.linalg.eig(m)
    order = sort_key(values)
    values = values[order]
    right = right[:, order]

    scale = 1.0 + np.linalg.norm(m)
    gaps = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(gaps, np.inf)
    degenerate = bool(gaps.min() < DEGENERACY_RTOL * scale)

    condition = float(np.linalg.cond(right))
    try:
        left = np.linalg.solve(right, np.eye(len(values), dtype=complex))
    except np.linalg.LinAlgError:
        left = np.linalg.pinv(right)
        degenerate = True
    return EigSystem(values=values, right=right, left=left,
                     degenerate=degenerate, condition=condition)


def expm(m, t=1.0) -> np.ndarray:
    """exp(M t) by scaling and squaring (Pade core).

    Raises ExpmOverflow instead of returning infinities when ||M t||_1
    exceeds EXPM_NORM_BOUND.
    """
    m = _check_square(m)
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    scaled = m * t
    norm = np.linalg.norm(scaled, 1)
    if norm > EXPM_NORM_BOUND:
        raise ExpmOverflow(
            f"||M t||_1 = {norm:.3g} exceeds the overflow bound {EXPM_NORM_BOUND}")
    return scipy.linalg.expm(scaled)


def solve(m, b) -> np.ndarray:
    """Solve M x = b, raising SingularMatrix on a negligible pivot."""
    m = _check_square(m)
    b = np.asarray(b, dtype=complex)
    with warnings.catch_warnings():
        # singularity is diagnosed from the pivots below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < SINGULAR_PIVOT_RTOL * np.linalg.norm(m):
        raise SingularMatrix(
            f"pivot {pivots.min():.3g} below {SINGULAR_PIVOT_RTOL} * ||M||")
    return scipy.linalg.lu_solve((lu, piv), b)
