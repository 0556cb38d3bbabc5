#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Pytest suite for the operator algebra

Tests:
- Tensor products and basis bookkeeping
- Partial traces and trace distance
- Eigendecomposition, spectral exponential
- Kraus maps (global and local), contractivity
- Random generators and their determinism
"""
import numpy as np
import pytest

from corrwitness.errors import DimensionMismatchError, InvalidOperatorError
from corrwitness.operators import (
    PAULI_X,
    PAULI_Z,
    DensityOperator,
    HermitianOperator,
    KrausMap,
    UnitaryOperator,
    apply_kraus,
    apply_kraus_local,
    apply_unitary,
    basis_ket,
    compose,
    expm_hermitian,
    hermitian_eig,
    identity_channel,
    local_unitary,
    maximally_mixed,
    operator_schmidt_rank,
    partial_trace,
    partial_trace_E,
    partial_trace_S,
    permute_subsystems,
    pure_state,
    random_hermitian,
    random_kraus,
    random_state,
    random_unitary,
    replacement_channel,
    reset_channel,
    tensor,
    trace_distance,
)

SEEDS = [0, 1, 7, 42, 2024, 31337, 2 ** 32 - 1]
MIXED_DIMS = [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)]

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def projector(d: int, index: int) -> np.ndarray:
    ket = basis_ket(d, index)
    return np.outer(ket, ket.conj())


class TestContainers:
    """Construction-time invariants"""

    def test_density_rejects_wrong_trace(self):
        with pytest.raises(InvalidOperatorError) as info:
            DensityOperator(np.diag([0.5, 0.4]))
        assert info.value.invariant == "unit trace"

    def test_density_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)
        with pytest.raises(InvalidOperatorError) as info:
            DensityOperator(m)
        assert info.value.invariant == "hermiticity"

    def test_density_rejects_negative_eigenvalue(self):
        with pytest.raises(InvalidOperatorError) as info:
            DensityOperator(np.diag([1.2, -0.2]))
        assert info.value.invariant == "positivity"

    def test_unitary_rejects_non_unitary(self):
        with pytest.raises(InvalidOperatorError):
            UnitaryOperator(np.diag([1.0, 0.5]))

    def test_dims_must_match_size(self):
        with pytest.raises(DimensionMismatchError):
            DensityOperator(np.eye(4) / 4, (2, 3))

    def test_matrix_is_read_only(self):
        rho = maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_kraus_rejects_non_trace_preserving(self):
        with pytest.raises(InvalidOperatorError) as info:
            KrausMap((0.5 * np.eye(2),))
        assert info.value.invariant == "trace preservation"


class TestTensorProduct:
    """a (x) b with the system factor leftmost"""

    def test_identity(self):
        out = tensor(np.eye(2), np.eye(2))
        assert np.array_equal(out, np.eye(4))

    def test_basis_bookkeeping(self):
        out = tensor(projector(2, 0), projector(2, 1))
        assert np.array_equal(out, np.diag([0, 1, 0, 0]).astype(complex))

    def test_mixed_product(self):
        I2 = np.eye(2)
        product = tensor(PAULI_X, I2) @ tensor(I2, PAULI_X)
        assert np.array_equal(product, tensor(PAULI_X, PAULI_X))

    def test_state_kind_is_kept(self):
        out = tensor(maximally_mixed(2), pure_state([1, 0]))
        assert isinstance(out, DensityOperator)
        assert out.dims == (2, 2)


class TestPartialTrace:
    """Tr_E and Tr_S"""

    def test_product_marginals(self):
        rho_S = random_state(2, seed=1).matrix
        rho_E = random_state(3, seed=2).matrix
        joint = np.kron(rho_S, rho_E)
        assert np.allclose(partial_trace_E(joint, (2, 3)), rho_S, atol=1e-14)
        assert np.allclose(partial_trace_S(joint, (2, 3)), rho_E, atol=1e-14)

    def test_bell_marginals(self, bell_state):
        assert np.array_equal(partial_trace_E(bell_state).matrix, np.eye(2) / 2)
        assert np.array_equal(partial_trace_S(bell_state).matrix, np.eye(2) / 2)

    def test_trace_chaining(self):
        m = random_hermitian(6, seed=3).matrix
        reduced = partial_trace_S(m, (2, 3))
        assert abs(np.trace(reduced) - np.trace(m)) < 1e-12

    def test_three_factors(self):
        a, b, c = (random_state(d, seed=d).matrix for d in (2, 3, 2))
        joint = np.kron(a, np.kron(b, c))
        assert np.allclose(partial_trace(joint, (2, 3, 2), [1]), b, atol=1e-14)
        assert np.allclose(partial_trace(joint, (2, 3, 2), [0, 2]), np.kron(a, c), atol=1e-14)

    def test_keep_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            partial_trace(np.eye(4), (2, 2), [2])

    @pytest.mark.parametrize("seed", SEEDS)
    @pytest.mark.parametrize("weight", [-2.0, -0.3, 0.0, 1.0, 1.7])
    def test_linearity(self, seed, weight):
        rng = np.random.default_rng(seed)
        a = random_hermitian(6, seed=rng).matrix
        b = random_hermitian(6, seed=rng).matrix
        left = partial_trace_E(a + weight * b, (3, 2))
        right = partial_trace_E(a, (3, 2)) + weight * partial_trace_E(b, (3, 2))
        assert np.max(np.abs(left - right)) < 1e-12


class TestPermutation:

    def test_swap_of_product(self):
        rho_S = random_state(2, seed=5).matrix
        rho_E = random_state(3, seed=6).matrix
        swapped = permute_subsystems(np.kron(rho_S, rho_E), (2, 3), (1, 0))
        assert np.allclose(swapped, np.kron(rho_E, rho_S), atol=1e-14)

    def test_not_a_permutation(self):
        with pytest.raises(DimensionMismatchError):
            permute_subsystems(np.eye(4), (2, 2), (0, 0))


class TestTraceDistance:
    """D(rho, sigma) = (1/2) sum |lambda(rho - sigma)|"""

    def test_identical(self):
        rho = random_state(3, seed=7)
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure(self):
        assert abs(trace_distance(projector(2, 0), projector(2, 1)) - 1.0) < 1e-14

    def test_bell_vs_maximally_mixed(self, bell_state):
        d = trace_distance(bell_state, np.eye(4) / 4)
        print(f"\n  D(Phi+, I/4) = {d:.15f}")
        assert abs(d - 0.75) < 1e-12, f"D = {d}, expected 3/4"

    def test_triangle_inequality(self):
        for seed in range(500):
            rng = np.random.default_rng(seed)
            N = int(np.prod(MIXED_DIMS[seed % len(MIXED_DIMS)]))
            a, b, c = (random_state(N, seed=rng) for _ in range(3))
            slack = trace_distance(a, b) + trace_distance(b, c) - trace_distance(a, c)
            assert slack >= -1e-12, f"seed {seed}, N={N}: slack {slack:.3e}"

    def test_unitary_invariance(self):
        for seed in range(500):
            rng = np.random.default_rng(seed)
            N = int(np.prod(MIXED_DIMS[seed % len(MIXED_DIMS)]))
            a, b = random_state(N, seed=rng), random_state(N, seed=rng)
            u = random_unitary(N, seed=rng)
            moved = trace_distance(apply_unitary(u, a), apply_unitary(u, b))
            assert abs(moved - trace_distance(a, b)) < 1e-12, f"seed {seed}, N={N}"

    def test_partial_trace_contractivity(self):
        for seed in range(500):
            rng = np.random.default_rng(seed)
            dims = MIXED_DIMS[seed % len(MIXED_DIMS)]
            N = int(np.prod(dims))
            a, b = random_state(N, seed=rng), random_state(N, seed=rng)
            reduced = trace_distance(partial_trace_E(a.matrix, dims),
                                     partial_trace_E(b.matrix, dims))
            assert reduced <= trace_distance(a, b) + 1e-10, f"seed {seed}, dims {dims}"


class TestEigendecomposition:

    def test_diagonal(self):
        values, vectors = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(values, [3.0, 2.0, 1.0])
        assert np.allclose(np.abs(vectors), np.eye(3)[:, [0, 2, 1]])

    def test_pauli_x(self):
        values, vectors = hermitian_eig(PAULI_X)
        plus = np.array([1, 1]) / np.sqrt(2)
        minus = np.array([1, -1]) / np.sqrt(2)
        assert np.allclose(values, [1.0, -1.0])
        assert abs(abs(np.vdot(plus, vectors[:, 0])) - 1.0) < 1e-12
        assert abs(abs(np.vdot(minus, vectors[:, 1])) - 1.0) < 1e-12

    def test_reconstruction_residual(self):
        h = random_hermitian(12, seed=8).matrix
        values, vectors = hermitian_eig(h)
        residual = np.max(np.abs((vectors * values) @ vectors.conj().T - h))
        print(f"\n  12x12 reconstruction residual = {residual:.3e}")
        assert residual <= 1e-10
        assert np.all(np.diff(values) <= 0), "eigenvalues must be descending"

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidOperatorError):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


class TestExponential:
    """exp(-iht)"""

    def test_time_zero(self):
        u = expm_hermitian(random_hermitian(4, seed=9), 0.0)
        assert np.allclose(u.matrix, np.eye(4), atol=1e-14)

    def test_pauli_z_at_pi(self):
        u = expm_hermitian(PAULI_Z, np.pi).matrix
        assert np.allclose(u, -np.eye(2), atol=1e-12)
        assert np.allclose(u @ projector(2, 0) @ u.conj().T, projector(2, 0), atol=1e-12)

    def test_group_law(self):
        h = random_hermitian(4, seed=10)
        left = expm_hermitian(h, 0.3).matrix @ expm_hermitian(h, 1.1).matrix
        assert np.max(np.abs(left - expm_hermitian(h, 1.4).matrix)) <= 1e-10


class TestChannels:
    """Kraus maps"""

    def test_identity_channel(self):
        rho = random_state(3, seed=13)
        assert np.allclose(apply_kraus(identity_channel(3), rho).matrix, rho.matrix)

    def test_reset_channel(self):
        k = reset_channel(2)
        assert len(k) == 2
        out = apply_kraus(k, random_state(2, seed=14))
        assert np.allclose(out.matrix, projector(2, 0), atol=1e-14)

    def test_replacement_channel(self):
        target = random_state(3, seed=15)
        out = apply_kraus(replacement_channel(target), random_state(3, seed=16))
        assert np.max(np.abs(out.matrix - target.matrix)) < 1e-12

    def test_compose_order(self):
        target = random_state(2, seed=17)
        k = compose(replacement_channel(target), reset_channel(2))
        out = apply_kraus(k, random_state(2, seed=18))
        assert np.max(np.abs(out.matrix - target.matrix)) < 1e-12

    def test_swap_conjugation(self):
        rho_S = random_state(2, seed=19).matrix
        rho_E = random_state(2, seed=20).matrix
        out = apply_unitary(SWAP, np.kron(rho_S, rho_E))
        assert np.allclose(out, np.kron(rho_E, rho_S), atol=1e-14)

    def test_contractivity(self):
        worst = -np.inf
        for seed in range(500):
            rng = np.random.default_rng(seed)
            N = int(np.prod(MIXED_DIMS[seed % len(MIXED_DIMS)]))
            k = random_kraus(N, 2, seed=rng)
            rho, sigma = random_state(N, seed=rng), random_state(N, seed=rng)
            after = trace_distance(apply_kraus(k, rho), apply_kraus(k, sigma))
            change = after - trace_distance(rho, sigma)
            assert change <= 1e-10, f"seed {seed}, N={N}: distance grew by {change:.3e}"
            worst = max(worst, change)
        print(f"\n  largest change over 500 triples: {worst:.3e}")


class TestLocalChannels:
    """F_S (x) id_E"""

    def test_local_identity(self, bell_state):
        out = apply_kraus_local(identity_channel(2), bell_state)
        assert np.array_equal(out.matrix, bell_state.matrix)

    def test_environment_marginal_unchanged(self):
        rho = random_state(6, seed=21, dims=(3, 2))
        out = apply_kraus_local(random_kraus(3, 3, seed=22), rho)
        gap = np.max(np.abs(partial_trace_S(out).matrix - partial_trace_S(rho).matrix))
        assert gap < 1e-13

    def test_product_input(self):
        rho_S = random_state(2, seed=23).matrix
        rho_E = random_state(2, seed=24).matrix
        k = random_kraus(2, 2, seed=25)
        out = apply_kraus_local(k, np.kron(rho_S, rho_E), (2, 2))
        expected = np.kron(apply_kraus(k, rho_S).matrix, rho_E)
        assert np.max(np.abs(out - expected)) < 1e-13

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            apply_kraus_local(identity_channel(3), np.eye(4) / 4, (2, 2))


class TestRandomInstances:

    def test_rank_one_is_pure(self):
        rho = random_state(4, rank=1, seed=26)
        assert abs(rho.purity() - 1.0) <= 1e-12

    def test_state_determinism(self):
        a = random_state(4, seed=27).matrix
        b = random_state(4, seed=27).matrix
        assert a.tobytes() == b.tobytes(), "same seed must reproduce bitwise"

    def test_unitary_defect(self):
        u = random_unitary(8, seed=28).matrix
        defect = np.max(np.abs(u.conj().T @ u - np.eye(8)))
        assert defect <= 1e-12, f"||U^dagger U - I|| = {defect:.3e}"

    def test_random_hermitian_scale(self):
        h = random_hermitian(5, seed=29, scale=2.0)
        assert isinstance(h, HermitianOperator)
        assert abs(np.max(np.abs(h.matrix)) - 2.0) < 1e-12

    def test_rank_out_of_range(self):
        with pytest.raises(ValueError):
            random_state(3, rank=4)


class TestSchmidtRank:
    """Factorized vs entangling unitaries"""

    def test_local_unitary_rank_one(self):
        u = local_unitary(random_unitary(2, seed=30), random_unitary(3, seed=31))
        assert operator_schmidt_rank(u) == 1

    def test_swap_rank_four(self):
        assert operator_schmidt_rank(SWAP, (2, 2)) == 4

    def test_bell_state_is_pure(self, bell_state):
        assert abs(bell_state.purity() - 1.0) < 1e-15


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
