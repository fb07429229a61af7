"""Closed Jaynes-Cummings system at conserved excitation number.

The Hamiltonian H = delta*sigma_z + g(a sigma_+ + a^dag sigma_-) commutes
with the excitation number N = a^dag a + (sigma_z + 1)/2, so it splits into
two-dimensional sectors spanned by (|n-1,1>, |n,0>).  That basis order is
fixed here once and inherited by every vectorization downstream.

Units: hbar = 1 and the coupling g defaults to 1; detuning and decay rates
are expressed in units of g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class InvalidExcitation(ValueError):
    """Excitation number outside the sector structure of the model."""


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the dissipative model.

    delta : detuning (half the atomic splitting), in units of g.
    g : atom-cavity coupling, > 0.
    gamma0 : rate of the jump operator a^dag sigma_-  (atom decays, photon added).
    gamma1 : rate of the jump operator a sigma_+      (photon removed, atom excited).
    """

    delta: float = 0.0
    g: float = 1.0
    gamma0: float = 0.0
    gamma1: float = 0.0

    def __post_init__(self):
        for name in ("delta", "g", "gamma0", "gamma1"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if self.gamma0 < 0 or self.gamma1 < 0:
            raise ValueError("decay rates must be non-negative")

    @property
    def gamma_sum(self):
        """Combined damping rate gamma0 + gamma1.

        This is the rate that enters the coherence damping of the sector
        generators.  The sum convention is pinned by requiring the trace of
        each generator block to equal the sum of its closed-form eigenvalues
        (the difference convention gamma1 - gamma0 fails that check; the
        validate command reports both).
        """
        return self.gamma0 + self.gamma1


class BasisLabel(NamedTuple):
    """Product basis state |photons, atom> with atom in {0, 1}."""

    photons: int
    atom: int


def _check_label(label):
    photons, atom = label
    if photons < 0 or atom not in (0, 1):
        raise InvalidExcitation(f"invalid basis label {label!r}")


def excitation_of(label) -> int:
    """Total excitation number photons + atom of a basis state."""
    _check_label(label)
    return label[0] + label[1]


def hamiltonian_block(n, p: ModelParams) -> np.ndarray:
    """Hamiltonian restricted to the excitation-n sector.

    For n >= 1 this is the 2x2 matrix [[delta, g sqrt(n)], [g sqrt(n), -delta]]
    in the basis (|n-1,1>, |n,0>).  The n = 0 sector holds the single state
    |0,0>, on which sigma_z acts as -1, so the block is the 1x1 matrix
    [[-delta]].
    """
    if n < 0:
        raise InvalidExcitation(f"excitation number must be >= 0, got {n}")
    if n == 0:
        return np.array([[-p.delta]], dtype=complex)
    c = p.g * math.sqrt(n)
    return np.array([[p.delta, c], [c, -p.delta]], dtype=complex)


def eigenenergies(n, p: ModelParams):
    """The pair (+E_n, -E_n) with E_n = sqrt(delta^2 + g^2 n)."""
    if n < 1:
        raise InvalidExcitation(f"excitation number must be >= 1, got {n}")
    e = math.hypot(p.delta, p.g * math.sqrt(n))
    return e, -e


def mixing_angle(n, p: ModelParams) -> float:
    """Rotation angle of the sector eigenbasis, in [0, pi/2).

    theta_n = arctan sqrt((E_n - delta)/(E_n + delta)); pi/4 on resonance.
    """
    e, _ = eigenenergies(n, p)
    return math.atan(math.sqrt((e - p.delta) / (e + p.delta)))


def dressed_state(n, sign, p: ModelParams) -> np.ndarray:
    """Sector eigenvector with energy sign * E_n, in the basis (|n-1,1>, |n,0>).

    sign=+1 gives (cos theta, sin theta), sign=-1 gives (-sin theta, cos theta).
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    th = mixing_angle(n, p)
    if sign == +1:
        return np.array([math.cos(th), math.sin(th)], dtype=complex)
    return np.array([-math.sin(th), math.cos(th)], dtype=complex)
