"""Excitation-conserving generator blocks.

Both jump operators commute with the excitation number, so the full
master-equation generator never couples the sector pair (n, m) to any
other: it acts block by block on the 2x2 sub-matrices rho_{n,m}, each
flattened to a vector of length dim_left * dim_right in the order
[rho^{11}, rho^{10}, rho^{01}, rho^{00}] (components whose atom index
does not exist in a reduced sector are dropped).

Two constructions of the same block family are provided:

``printed``
    The closed-form reference generator, with geometric-mean sqrt(n*m)
    damping on every dissipative entry.  This is the form whose
    eigensystem is known in closed form at zero detuning.

``canonical``
    Assembled entry by entry from -i[H, .] plus the two dissipators,
    giving arithmetic-mean damping (n+m)/2 on populations and
    (n*gamma0 + m*gamma1)/2 on coherences.  This is the physically
    guaranteed completely positive generator.

The two agree exactly on every diagonal sector n = m and differ on
off-diagonal sectors; the brute-force reference in ``exciton.oracle``
always matches the canonical mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import ModelParams

PRINTED = "printed"
CANONICAL = "canonical"
MODES = (PRINTED, CANONICAL)


class DimensionMismatch(ValueError):
    """Vector or block shape inconsistent with the sector index."""


class BlockIndex(NamedTuple):
    """Pair of left/right excitation numbers labelling one sector block."""

    n: int
    m: int

    @property
    def dim_left(self):
        return 1 if self.n == 0 else 2

    @property
    def dim_right(self):
        return 1 if self.m == 0 else 2

    @property
    def dim(self):
        """Length of the vectorized block."""
        return self.dim_left * self.dim_right


def _check_index(index) -> BlockIndex:
    index = BlockIndex(*index)
    if index.n < 0 or index.m < 0:
        raise ValueError(f"excitation numbers must be >= 0, got {index}")
    return index


@dataclass(frozen=True, eq=False)
class LiouvillianBlock:
    """One sector generator: a dim x dim matrix acting on a vectorized block."""

    index: BlockIndex
    mode: str
    matrix: np.ndarray


def vectorize(block) -> np.ndarray:
    """Flatten a block row-major: [rho^{11}, rho^{10}, rho^{01}, rho^{00}]."""
    block = np.asarray(block, dtype=complex)
    if block.ndim != 2:
        raise DimensionMismatch(f"expected a 2D block, got shape {block.shape}")
    return block.reshape(-1)


def devectorize(vec, index) -> np.ndarray:
    """Inverse of vectorize for the sector shape of ``index``."""
    index = _check_index(index)
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (index.dim,):
        raise DimensionMismatch(
            f"vector of length {vec.shape} does not fit sector {index} "
            f"(expected {index.dim})")
    return vec.reshape(index.dim_left, index.dim_right)


def _kept_positions(index):
    # Positions of allowed (j, k) components in the full 4-vector order.
    js = (1, 0) if index.n >= 1 else (0,)
    ks = (1, 0) if index.m >= 1 else (0,)
    return [2 * (1 - j) + (1 - k) for j in js for k in ks]


def _printed_full(n, m, p: ModelParams, gamma_sum=None):
    """Unreduced 4x4 printed-mode matrix; gamma_sum overridable so the
    trace-consistency report can evaluate the rejected difference convention."""
    g0, g1, g, d = p.gamma0, p.gamma1, p.g, p.delta
    sn, sm = math.sqrt(n), math.sqrt(m)
    smn = math.sqrt(n * m)
    if gamma_sum is None:
        # Distributed form smn*g0 + smn*g1; bitwise equal to the canonical
        # coherence damping on diagonal sectors.
        coh = (smn * g0 + smn * g1) / 2.0
    else:
        coh = smn * gamma_sum / 2.0
    return np.array([
        [-smn * g0,    1j * g * sm,        -1j * g * sn,        smn * g1],
        [1j * g * sm,  -2j * d - coh,      0.0,                 -1j * g * sn],
        [-1j * g * sn, 0.0,                2j * d - coh,        1j * g * sm],
        [smn * g0,     -1j * g * sn,       1j * g * sm,         -smn * g1],
    ], dtype=complex)


def _canonical_full(n, m, p: ModelParams):
    g0, g1, g, d = p.gamma0, p.gamma1, p.g, p.delta
    sn, sm = math.sqrt(n), math.sqrt(m)
    smn = math.sqrt(n * m)
    return np.array([
        [-(n + m) * g0 / 2.0, 1j * g * sm,                   -1j * g * sn,                  smn * g1],
        [1j * g * sm,         -2j * d - (n * g0 + m * g1) / 2.0, 0.0,                       -1j * g * sn],
        [-1j * g * sn,        0.0,                           2j * d - (m * g0 + n * g1) / 2.0, 1j * g * sm],
        [smn * g0,            -1j * g * sn,                  1j * g * sm,                   -(n + m) * g1 / 2.0],
    ], dtype=complex)


def liouvillian_block(index, p: ModelParams, mode=CANONICAL) -> LiouvillianBlock:
    """Generator of the sector pair ``index`` in the requested mode.

    Sectors with n = 0 or m = 0 are obtained by deleting the rows and
    columns of the disallowed atom components from the 4x4 form; the
    surviving entries already carry the correct n = 0 (or m = 0) rates.
    """
    index = _check_index(index)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    build = _printed_full if mode == PRINTED else _canonical_full
    full = build(index.n, index.m, p)
    keep = _kept_positions(index)
    return LiouvillianBlock(index=index, mode=mode,
                            matrix=full[np.ix_(keep, keep)])


def block_trace_vector(index) -> np.ndarray:
    """Row functional t with t @ vectorize(rho) = sum of diagonal components.

    For diagonal sectors this is the physical trace of the block; on
    off-diagonal sectors it sums whatever j = k positions exist.
    """
    index = _check_index(index)
    js = (1, 0) if index.n >= 1 else (0,)
    ks = (1, 0) if index.m >= 1 else (0,)
    return np.array([1.0 if j == k else 0.0 for j in js for k in ks])
