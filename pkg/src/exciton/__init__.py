"""Excitation-conserving dissipative Jaynes-Cummings dynamics.

The model couples a two-level atom to one cavity mode and adds two jump
operators that conserve the total excitation number, so the full
master-equation generator splits into independent blocks of dimension
at most four.  This package builds those blocks (in a closed-form
"printed" variant and a physically canonical variant), solves them
spectrally with closed forms at zero detuning, propagates blocked
density matrices by spectral sum or matrix exponential, reduces to
atomic observables, and cross-checks everything against a brute-force
integrator on the full truncated space.
"""

from .linalg import EigSystem, ExpmOverflow, SingularMatrix, eig_general, expm, solve
from .liouville import (
    CANONICAL,
    PRINTED,
    BlockIndex,
    DimensionMismatch,
    LiouvillianBlock,
    block_trace_vector,
    devectorize,
    liouvillian_block,
    vectorize,
)
from .model import (
    BasisLabel,
    InvalidExcitation,
    ModelParams,
    dressed_state,
    eigenenergies,
    excitation_of,
    hamiltonian_block,
    mixing_angle,
)
from .spectral import (
    DegenerateBlock,
    FallbackRequired,
    PreconditionViolated,
    SpectralDecomposition,
    closed_eigenvalues,
    closed_eigenvectors,
    match_eigenvalues,
    propagate_block,
    spectral_decomposition,
    trace_consistency_report,
)
from .dynamics import (
    AtomState,
    BlockedDensity,
    DRESSED_PRESETS,
    EvolutionResult,
    MethodUnavailable,
    SUPERPOSITION_PRESETS,
    TimeSeries,
    closed_form_dressed,
    closed_form_superposition,
    evolve,
    initial_dressed,
    initial_fock,
    initial_superposition,
    population_inversion,
    purity,
    reduce_atom,
    time_grid,
)
from .oracle import (
    FullSuperoperator,
    RK4Result,
    StepTooLarge,
    TruncationTooLarge,
    TruncationTooSmall,
    assemble,
    build_full_superoperator,
    disassemble,
    extract_sector,
    rk4_evolve,
)

__version__ = "0.1.0"
