import math

import numpy as np
import pytest

from exciton import linalg
from exciton.liouville import CANONICAL, PRINTED, BlockIndex, liouvillian_block, vectorize
from exciton.model import ModelParams
from exciton.spectral import (
    CLOSED_FORM,
    NUMERICAL,
    DegenerateBlock,
    FallbackRequired,
    PreconditionViolated,
    closed_eigenvalues,
    closed_eigenvectors,
    match_eigenvalues,
    propagate_block,
    spectral_decomposition,
    trace_consistency_report,
)

RNG_BLOCK_RANGE = range(1, 7)


def rate_sweep(rng, count):
    for _ in range(count):
        yield ModelParams(gamma0=float(rng.uniform(0, 2)),
                          gamma1=float(rng.uniform(0, 2)))


def min_gap(values):
    n = len(values)
    return min(abs(values[i] - values[j]) for i in range(n) for j in range(i + 1, n))


class TestClosedEigenvalues:
    def test_stationary_label_is_exactly_zero(self):
        rng = np.random.default_rng(13)
        for p in rate_sweep(rng, 25):
            for n in RNG_BLOCK_RANGE:
                lam = closed_eigenvalues(BlockIndex(n, n), p)
                assert lam[3] == 0.0

    def test_undamped_diagonal_block(self):
        lam = closed_eigenvalues(BlockIndex(2, 2), ModelParams())
        expected = np.array([-2j * math.sqrt(2), 2j * math.sqrt(2), 0.0, 0.0])
        assert np.allclose(lam, expected, atol=1e-14)

    def test_frozen_example(self):
        lam = closed_eigenvalues(BlockIndex(1, 1), ModelParams(gamma0=0.2, gamma1=0.4))
        assert np.allclose(
            lam, [-0.45 - 1.99437j, -0.45 + 1.99437j, -0.3, 0.0], atol=1e-5)

    def test_matches_numerical_spectrum(self):
        rng = np.random.default_rng(14)
        for p in rate_sweep(rng, 15):
            for n in RNG_BLOCK_RANGE:
                for m in RNG_BLOCK_RANGE:
                    index = BlockIndex(n, m)
                    lam = closed_eigenvalues(index, p)
                    num = np.linalg.eigvals(liouvillian_block(index, p, PRINTED).matrix)
                    assert np.abs(match_eigenvalues(lam, num) - lam).max() <= 1e-8

    def test_sum_equals_printed_trace(self):
        rng = np.random.default_rng(15)
        for p in rate_sweep(rng, 20):
            for n in RNG_BLOCK_RANGE:
                for m in RNG_BLOCK_RANGE:
                    index = BlockIndex(n, m)
                    lam = closed_eigenvalues(index, p)
                    trace = np.trace(liouvillian_block(index, p, PRINTED).matrix)
                    assert abs(lam.sum() - trace) <= 1e-12 * (1 + abs(trace))

    def test_preconditions(self):
        with pytest.raises(PreconditionViolated):
            closed_eigenvalues(BlockIndex(1, 1), ModelParams(delta=0.5))
        with pytest.raises(PreconditionViolated):
            closed_eigenvalues(BlockIndex(1, 1), ModelParams(g=2.0))
        with pytest.raises(PreconditionViolated):
            closed_eigenvalues(BlockIndex(0, 1), ModelParams())


class TestClosedEigenvectors:
    def test_left_stationary_is_identity_on_diagonal_sectors(self):
        lefts, rights = closed_eigenvectors(BlockIndex(3, 3),
                                            ModelParams(gamma0=0.3, gamma1=0.1))
        assert np.abs(lefts[3] - np.eye(2)).max() <= 1e-12

    def test_stationary_block_frozen_example(self):
        p = ModelParams(gamma0=0.2, gamma1=0.4)
        _, rights = closed_eigenvectors(BlockIndex(1, 1), p)
        stationary = rights[3]
        expected = np.array([[0.50718, 0.04785j], [-0.04785j, 0.49282]])
        assert np.abs(stationary - expected).max() <= 1e-5
        assert abs(np.trace(stationary) - 1.0) <= 1e-14
        gen = liouvillian_block(BlockIndex(1, 1), p, PRINTED).matrix
        assert np.abs(gen @ vectorize(stationary)).max() <= 1e-14

    def test_biorthonormality_spec_example(self):
        p = ModelParams(gamma0=0.3, gamma1=0.1)
        lefts, rights = closed_eigenvectors(BlockIndex(2, 3), p)
        gram = np.array([[np.trace(l @ r) for r in rights] for l in lefts])
        assert np.abs(gram - np.eye(4)).max() <= 1e-12

    def test_residuals_sweep(self):
        rng = np.random.default_rng(16)
        for p in rate_sweep(rng, 12):
            for n in RNG_BLOCK_RANGE:
                for m in RNG_BLOCK_RANGE:
                    index = BlockIndex(n, m)
                    lam = closed_eigenvalues(index, p)
                    if min_gap(lam) < 1e-3:
                        continue
                    lefts, rights = closed_eigenvectors(index, p)
                    gen = liouvillian_block(index, p, PRINTED).matrix
                    scale = 1e-9 * (1 + np.linalg.norm(gen))
                    for lam_j, lft, rgt in zip(lam, lefts, rights):
                        rvec = vectorize(rgt)
                        lvec = lft.T.reshape(-1)
                        assert np.linalg.norm(gen @ rvec - lam_j * rvec) <= scale
                        assert np.linalg.norm(lvec @ gen - lam_j * lvec) <= scale

    def test_fallback_on_undamped_diagonal(self):
        with pytest.raises(FallbackRequired):
            closed_eigenvectors(BlockIndex(2, 2), ModelParams())

    def test_fallback_at_exceptional_point(self):
        # gamma_sum = 8 collapses the two fast eigenvalues of sector (1,1)
        with pytest.raises(FallbackRequired):
            closed_eigenvectors(BlockIndex(1, 1), ModelParams(gamma0=4.0, gamma1=4.0))


class TestDecompositionDispatch:
    def test_closed_form_dispatch(self):
        dec = spectral_decomposition(BlockIndex(2, 2),
                                     ModelParams(gamma0=0.08), PRINTED)
        assert dec.source == CLOSED_FORM and not dec.degenerate

    def test_detuning_forces_numerical(self):
        dec = spectral_decomposition(BlockIndex(2, 2),
                                     ModelParams(delta=0.5, gamma0=0.08), PRINTED)
        assert dec.source == NUMERICAL

    def test_canonical_mode_is_numerical(self):
        dec = spectral_decomposition(BlockIndex(2, 3),
                                     ModelParams(gamma0=0.08), CANONICAL)
        assert dec.source == NUMERICAL

    def test_exceptional_point_flagged_degenerate(self):
        dec = spectral_decomposition(BlockIndex(1, 1),
                                     ModelParams(gamma0=8.0, gamma1=0.0), PRINTED)
        assert dec.source == NUMERICAL
        assert dec.degenerate
        with pytest.raises(DegenerateBlock):
            propagate_block(dec, 0.5 * np.ones((2, 2)), 1.0)

    def test_numerical_decomposition_biorthonormal(self):
        rng = np.random.default_rng(17)
        for p in rate_sweep(rng, 10):
            index = BlockIndex(int(rng.integers(0, 5)), int(rng.integers(0, 5)))
            dec = spectral_decomposition(index, p, CANONICAL)
            if dec.degenerate:
                continue
            gram = np.array([[np.trace(l @ r) for r in dec.right] for l in dec.left])
            assert np.abs(gram - np.eye(index.dim)).max() <= 1e-9

    def test_closed_source_raises_outside_domain(self):
        with pytest.raises(PreconditionViolated):
            spectral_decomposition(BlockIndex(2, 2), ModelParams(delta=1.0),
                                   PRINTED, CLOSED_FORM)
        with pytest.raises(PreconditionViolated):
            spectral_decomposition(BlockIndex(2, 2), ModelParams(), CANONICAL,
                                   CLOSED_FORM)


class TestPropagation:
    def test_identity_at_time_zero(self):
        rng = np.random.default_rng(18)
        p = ModelParams(gamma0=0.4, gamma1=0.9)
        for index in (BlockIndex(1, 1), BlockIndex(2, 3), BlockIndex(0, 2)):
            dec = spectral_decomposition(index, p, CANONICAL)
            block = (rng.normal(size=(index.dim_left, index.dim_right))
                     + 1j * rng.normal(size=(index.dim_left, index.dim_right)))
            assert np.abs(propagate_block(dec, block, 0.0) - block).max() <= 1e-10

    def test_against_matrix_exponential(self):
        # dressed initial block of sector 2 at rates (0.08, 0)
        p = ModelParams(gamma0=0.08)
        index = BlockIndex(2, 2)
        dec = spectral_decomposition(index, p, PRINTED)
        block0 = 0.5 * np.ones((2, 2), dtype=complex)
        gen = liouvillian_block(index, p, PRINTED).matrix
        for t in (0.5, 3.0, 5.0, 17.0):
            via_expm = linalg.expm(gen, t) @ vectorize(block0)
            got = vectorize(propagate_block(dec, block0, t))
            assert np.abs(got - via_expm).max() <= 1e-9

    def test_semigroup_property(self):
        p = ModelParams(gamma0=0.6, gamma1=0.2)
        index = BlockIndex(2, 3)
        dec = spectral_decomposition(index, p, PRINTED)
        block0 = np.array([[0.2, 0.4], [0.1j, 0.3]])
        one_shot = propagate_block(dec, block0, 1.9)
        two_step = propagate_block(dec, propagate_block(dec, block0, 0.8), 1.1)
        assert np.abs(one_shot - two_step).max() <= 1e-9

    def test_long_time_limit_is_weighted_stationary_state(self):
        p = ModelParams(gamma0=0.9, gamma1=0.4)
        index = BlockIndex(3, 3)
        dec = spectral_decomposition(index, p, PRINTED)
        block0 = np.array([[0.4, 0.1], [0.1, 0.2]], dtype=complex)
        _, rights = closed_eigenvectors(index, p)
        limit = np.trace(block0) * rights[3]
        assert np.abs(propagate_block(dec, block0, 200.0) - limit).max() <= 1e-12


def test_trace_consistency_report():
    p = ModelParams(gamma0=1.2, gamma1=0.0)
    report = trace_consistency_report(BlockIndex(2, 2), p)
    assert report["sum"]["mismatch"] <= 1e-10
    assert report["difference"]["mismatch"] >= 0.1


def test_match_eigenvalues_is_a_permutation():
    ref = np.array([1.0, 1j, -1j, -2.0])
    shuffled = np.array([-2.0, -1j, 1.0, 1j])
    assert np.allclose(match_eigenvalues(ref, shuffled), ref)
