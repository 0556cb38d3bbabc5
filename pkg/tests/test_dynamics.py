#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Pytest suite for time-independent Hamiltonian dynamics

Tests:
- Time grid construction and bitwise refinement of sweeps
- Detection sweeps (factorized vs entangling evolution)
- Nested-commutator expansion and its order-by-order error
- ZZ spin chain, xy-plane family and its negative control
"""
import numpy as np
import pytest

from corrwitness import symbolic
from corrwitness.dynamics import (
    TimeGrid,
    bch_norm,
    bch_reduced,
    bloch_state,
    build_control_state,
    build_undetectable_family,
    build_zz_chain,
    chain_space,
    local_hamiltonian,
    pauli_z_at,
    site_pauli_components,
    sweep,
    verify_undetectable,
    witness_trajectory,
)
from corrwitness.errors import ConfigurationError, DimensionMismatchError, ScenarioError
from corrwitness.operators import (
    PAULI_Z,
    DensityOperator,
    half_trace_norm,
    hermitian_eig,
    operator_schmidt_rank,
    product_of_marginals,
    random_hermitian,
    random_state,
    unitary_from_eig,
)
from corrwitness.witness import build_R, reduced_witness


class TestTimeGrid:

    def test_endpoints(self):
        grid = TimeGrid(10.0, 5)
        assert grid.times[0] == 0.0
        assert grid.times[-1] == 10.0
        assert len(grid) == 5

    def test_refinement_is_bitwise(self):
        grid = TimeGrid(7.3, 11)
        fine = grid.refine(4)
        assert len(fine) == 41
        assert np.array_equal(fine.times[::4], grid.times)

    def test_sweep_refinement_is_bitwise(self):
        rho = random_state(4, seed=31, dims=(2, 2))
        H = random_hermitian(4, seed=32)
        grid = TimeGrid(6.0, 41)
        coarse = sweep(H, rho, product_of_marginals(rho), grid)
        fine = sweep(H, rho, product_of_marginals(rho), grid.refine(3))
        assert np.array_equal(fine.times[::3], coarse.times)
        assert np.array_equal(fine.witness_norms[::3], coarse.witness_norms)
        assert np.array_equal(fine.trace_distances[::3], coarse.trace_distances)

    @pytest.mark.parametrize("t_max, steps", [(0.0, 10), (-1.0, 10), (1.0, 1)])
    def test_rejected(self, t_max, steps):
        with pytest.raises(ConfigurationError):
            TimeGrid(t_max, steps)


class TestSweep:
    """Witness norm and reduced trace distance along exp(-iHt)"""

    def test_time_zero_is_undetected(self):
        rho = random_state(4, seed=1, dims=(2, 2))
        result = sweep(random_hermitian(4, seed=2), rho, product_of_marginals(rho), TimeGrid(1.0, 5))
        assert result.witness_norms[0] < 1e-14

    def test_factorized_evolution(self):
        rho = random_state(4, seed=3, dims=(2, 2))
        H = local_hamiltonian(random_hermitian(2, seed=4), random_hermitian(2, seed=5))
        result = sweep(H, rho, product_of_marginals(rho), TimeGrid(10.0, 50))
        print(f"\n  factorized: max norm = {result.max_norm:.3e}")
        assert result.max_norm < 1e-12
        assert np.max(np.abs(result.trace_distances - result.trace_distances[0])) < 1e-12
        assert result.detected_fraction == 0.0
        assert result.first_detection_time is None

    def test_generic_detection(self):
        rho = random_state(4, seed=6, dims=(2, 2))
        sigma = product_of_marginals(rho)
        H = random_hermitian(4, seed=7)
        coarse = sweep(H, rho, sigma, TimeGrid(10.0, 50))
        assert coarse.max_norm > 1e-9
        fine = sweep(H, rho, sigma, TimeGrid(10.0, 50).refine(20))
        print(f"\n  detected fraction on {len(fine.times)} points: {fine.detected_fraction:.4f}")
        assert fine.detected_fraction >= 0.99

    def test_bell_input(self, bell_state):
        result = sweep(random_hermitian(4, seed=8), bell_state, product_of_marginals(bell_state),
                       TimeGrid(10.0, 1000))
        assert result.detected_fraction >= 0.99
        assert result.first_detection_time is not None

    def test_threaded_matches_serial(self):
        rho = random_state(4, seed=9, dims=(2, 2))
        H = random_hermitian(4, seed=10)
        grid = TimeGrid(5.0, 40)
        serial = sweep(H, rho, product_of_marginals(rho), grid)
        threaded = sweep(H, rho, product_of_marginals(rho), grid, workers=4)
        assert np.array_equal(serial.witness_norms, threaded.witness_norms)

    def test_csv_rows(self):
        rho = random_state(4, seed=11, dims=(2, 2))
        result = sweep(random_hermitian(4, seed=12), rho, product_of_marginals(rho), TimeGrid(1.0, 3))
        rows = result.csv_rows()
        assert rows[0] == "t,witness_norm,trace_distance,td_rate"
        assert len(rows) == 4
        assert rows[1].startswith("0,")

    def test_needs_equal_system_marginals(self):
        rho = random_state(4, seed=13, dims=(2, 2))
        sigma = random_state(4, seed=14, dims=(2, 2))
        with pytest.raises(ScenarioError):
            sweep(random_hermitian(4, seed=15), rho, sigma, TimeGrid(1.0, 3))

    def test_shape_check(self):
        rho = random_state(4, seed=16, dims=(2, 2))
        with pytest.raises(DimensionMismatchError):
            sweep(np.eye(2), rho, rho, TimeGrid(1.0, 3))

    def test_trajectory_matches_sweep(self):
        rho = random_state(4, seed=17, dims=(2, 2))
        H = random_hermitian(4, seed=18)
        grid = TimeGrid(3.0, 7)
        result = sweep(H, rho, product_of_marginals(rho), grid)
        trajectory = witness_trajectory(H, build_R(rho), grid)
        assert np.max(np.abs(result.witness_norms - trajectory)) < 1e-12


class TestCommutatorExpansion:
    """Tr_E(R + [R, T] + [[R, T], T]/2! + ...)"""

    def test_order_zero(self):
        R = build_R(random_state(4, seed=19, dims=(2, 2)))
        assert bch_norm(random_hermitian(4, seed=20), R, 0.5, 0) < 1e-15

    def test_convergence(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            rho = random_state(4, seed=rng, dims=(2, 2))
            H = random_hermitian(4, seed=rng, scale=0.5)
            R = build_R(rho)
            exact = witness_trajectory(H, R, TimeGrid(0.01, 2))[-1]
            approx = bch_norm(H, R, 0.01, 8)
            assert abs(approx - exact) <= 1e-8, f"seed {seed}: {approx} vs {exact}"

    def test_error_falls_with_order(self):
        t = 0.05
        for seed in range(50):
            R = build_R(random_state(4, seed=seed, dims=(2, 2)))
            H = random_hermitian(4, seed=1000 + seed)
            U = unitary_from_eig(hermitian_eig(H), t).matrix
            exact = reduced_witness(R, U)
            errors = [half_trace_norm(bch_reduced(H, R, t, k) - exact)
                      for k in range(1, 9)]
            for k in range(len(errors) - 1):
                if errors[k] <= 1e-12:
                    break
                assert errors[k + 1] < errors[k], (
                    f"seed {seed}: order {k + 2} error {errors[k + 1]:.3e} "
                    f">= order {k + 1} error {errors[k]:.3e}"
                )

    def test_linear_scaling(self):
        rho = random_state(4, seed=21, dims=(2, 2))
        H = random_hermitian(4, seed=22)
        R = build_R(rho)
        small = bch_norm(H, R, 1e-3, 6)
        double = bch_norm(H, R, 2e-3, 6)
        print(f"\n  ratio at t -> 2t: {double / small:.6f}")
        assert abs(double / small - 2.0) < 0.1

    def test_order_cap(self):
        R = build_R(random_state(4, seed=23, dims=(2, 2)))
        with pytest.raises(ConfigurationError):
            bch_norm(np.eye(4), R, 0.1, 13)


class TestZZChain:

    def test_two_spins(self):
        H = build_zz_chain(2)
        assert np.array_equal(np.diag(H.matrix).real, [1, -1, -1, 1])

    def test_three_spins(self):
        H = build_zz_chain(3)
        exact = [int(v) for v in symbolic.zz_chain_diagonal(3)]
        assert exact == [2, 0, -2, 0, 0, -2, 0, 2]
        assert np.array_equal(np.diag(H.matrix).real, exact)

    def test_commutes_with_every_z(self):
        H = build_zz_chain(4).matrix
        for site in range(1, 5):
            Z = pauli_z_at(4, site)
            assert np.max(np.abs(H @ Z - Z @ H)) < 1e-12

    def test_couplings(self):
        H = build_zz_chain(3, couplings=[0.5, 2.0])
        exact = [float(v) for v in symbolic.zz_chain_diagonal(3, couplings=[0.5, 2])]
        assert np.allclose(np.diag(H.matrix).real, exact)

    def test_pauli_z_at_first_spin(self):
        assert np.array_equal(pauli_z_at(2, 1), np.kron(PAULI_Z, np.eye(2)))

    @pytest.mark.parametrize("n_spins", [1, 13])
    def test_length_limits(self, n_spins):
        with pytest.raises(ConfigurationError):
            build_zz_chain(n_spins)

    def test_chain_space(self):
        assert chain_space(3, 3).dims == (4, 2)
        assert chain_space(4, 2).dims == (2, 8)
        with pytest.raises(ConfigurationError):
            chain_space(3, 1)


class TestUndetectableFamily:
    """rho_{S Etilde} (x) (I + r_x X + r_y Y)/2"""

    def test_unpolarised_site(self):
        rest = random_state(4, seed=24).matrix
        rho = build_undetectable_family(3, 3, rest, 0.0, 0.0)
        assert np.allclose(rho.matrix, np.kron(rest, np.eye(2) / 2), atol=1e-15)

    def test_valid_state(self):
        rho = build_undetectable_family(3, 3, random_state(4, seed=25).matrix, 0.6, 0.3)
        assert isinstance(rho, DensityOperator)
        assert rho.dims == (4, 2)

    def test_site_in_the_middle(self):
        rest = random_state(4, seed=26).matrix
        rho = build_undetectable_family(3, 2, rest, 0.6, 0.0)
        components = site_pauli_components(rho.matrix, 3, 2)
        assert np.allclose(components["I"], rest / 2, atol=1e-14)
        assert np.allclose(components["X"], 0.3 * rest, atol=1e-14)

    def test_no_z_component(self):
        # spin 4 of the environment is correlated with the system
        rho = build_undetectable_family(4, 3, random_state(8, seed=27).matrix, 0.6, 0.3)
        R = build_R(rho)
        assert np.max(np.abs(R.matrix)) > 1e-3
        components = site_pauli_components(R.matrix, 4, 3)
        assert np.max(np.abs(components["Z"])) < 1e-14

    def test_outside_disk(self):
        with pytest.raises(ScenarioError):
            build_undetectable_family(3, 3, random_state(4, seed=28).matrix, 0.9, 0.9)

    def test_rest_size(self):
        with pytest.raises(DimensionMismatchError):
            build_undetectable_family(3, 3, np.eye(2) / 2, 0.1, 0.1)

    def test_bloch_state(self):
        assert np.allclose(bloch_state(0.0, 0.0, 1.0).matrix, np.diag([1.0, 0.0]))


class TestUndetectability:
    """All witness norms stay at zero under ZZ dynamics"""

    def test_three_spins(self):
        report = verify_undetectable(3, 3, 50, TimeGrid(10.0, 100), seed=0)
        print(f"\n  N=3: max norm = {report.max_witness_norm:.3e}, "
              f"max gain = {report.max_gain:.3e}, Schmidt rank = {report.schmidt_rank}")
        assert report.undetectable
        assert report.detected_trials == 0
        assert report.max_witness_norm <= 1e-9
        assert report.max_witness_norm_bar <= 1e-9
        assert report.max_gain <= 1e-9

    def test_evolution_does_not_factorize(self):
        report = verify_undetectable(3, 3, 1, TimeGrid(1.0, 3), seed=1)
        assert report.schmidt_rank > 1

    def test_longer_chain_middle_site(self):
        report = verify_undetectable(4, 3, 10, TimeGrid(10.0, 60), seed=2)
        assert report.undetectable

    def test_negative_control(self):
        report = verify_undetectable(3, 3, 10, TimeGrid(10.0, 100), seed=3, control=True)
        print(f"\n  control: max norm = {report.max_witness_norm:.3e}, "
              f"detected {report.detected_trials}/{report.trials}")
        assert not report.undetectable
        assert report.detected_trials > 0

    def test_control_state_dynamics(self):
        rest = np.diag([1.0, 0.0]).astype(complex)
        rho = build_control_state(3, 3, rest)
        H = build_zz_chain(3)
        eig = hermitian_eig(H)
        R = build_R(rho)
        u = unitary_from_eig(eig, np.pi / 4).matrix
        norm = witness_trajectory(H, R, TimeGrid(np.pi / 4, 2))[-1]
        assert norm > 1e-3
        assert operator_schmidt_rank(u, (4, 2)) > 1

    def test_report_dict(self):
        report = verify_undetectable(2, 2, 2, TimeGrid(1.0, 5), seed=4)
        out = report.to_dict()
        assert out["undetectable"] is True
        assert out["n_spins"] == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
