import numpy as np
import pytest

from epiqmap import density, numkit
from epiqmap.errors import FloorViolationError

GENERIC_S4 = np.array(
    [
        [-0.10, 0.30, 0.10, 0.05],
        [0.20, -0.15, 0.05, 0.10],
        [0.10, 0.05, -0.20, 0.30],
        [0.05, 0.20, 0.10, -0.25],
    ]
)

GENERIC_P = np.array([0.40, 0.30, 0.20, 0.10])


class TestSqrtDynamicsGenerator:
    def test_uniform_probabilities_halve_the_rates(self):
        h = density.sqrt_dynamics_generator(GENERIC_S4, np.full(4, 0.25))
        assert np.abs(h - 0.5 * GENERIC_S4).max() < 1e-15

    def test_diagonal_rates_independent_of_state(self):
        s = np.diag([0.1, -0.2, 0.3, -0.4])
        h1 = density.sqrt_dynamics_generator(s, GENERIC_P)
        h2 = density.sqrt_dynamics_generator(s, np.full(4, 0.25))
        assert np.array_equal(h1, h2)
        assert np.abs(h1 - 0.5 * s).max() < 1e-15

    def test_defining_identity(self):
        # 2 D (H sqrt(p)) must reproduce S p
        h = density.sqrt_dynamics_generator(GENERIC_S4, GENERIC_P)
        a = np.sqrt(GENERIC_P)
        lhs = 2.0 * a * (h @ a)
        assert np.abs(lhs - GENERIC_S4 @ GENERIC_P).max() <= 1e-12

    def test_floor_violation(self):
        with pytest.raises(FloorViolationError):
            density.sqrt_dynamics_generator(GENERIC_S4, np.array([0.5, 0.5, 0.0, 0.0]))


class TestEvolveSqrt:
    def test_identity_at_t0(self):
        out = density.evolve_sqrt(GENERIC_S4, GENERIC_P, 0.0, 0.0, 1e-3)
        assert np.abs(out - GENERIC_P).max() < 1e-15

    def test_diagonal_rates_exact_exponentials(self):
        s = np.diag([0.2, -0.1, 0.05, -0.3])
        out = density.evolve_sqrt(s, GENERIC_P, 0.0, 1.0, 1e-3)
        expected = np.exp(np.diag(s)) * GENERIC_P
        assert np.abs(out - expected).max() < 1e-10

    def test_generic_rates_vs_master_equation(self):
        out = density.evolve_sqrt(GENERIC_S4, GENERIC_P, 0.0, 1.0, 1e-4, check=False)
        oracle = numkit.mat_exp(GENERIC_S4) @ GENERIC_P
        assert np.abs(out - oracle).max() <= 1e-8

    def test_trajectory_squares_to_master_flow(self):
        traj = density.evolve_sqrt_trajectory(GENERIC_S4, GENERIC_P, 0.0, 2.0, 1e-3)
        for t, a in zip(traj.times[::100], traj.states[::100]):
            oracle = numkit.mat_exp(GENERIC_S4 * t) @ GENERIC_P
            assert np.abs(a * a - oracle).max() <= 1e-8

    def test_floor_violation_reports_time(self):
        s = np.diag([-50.0, 0.0, 0.0, 0.0])
        with pytest.raises(FloorViolationError) as info:
            density.evolve_sqrt(s, np.array([1e-10, 0.5, 0.3, 0.2]), 0.0, 2.0, 1e-3,
                                floor=1e-12, check=False)
        assert info.value.time is not None


class TestDensityMatrix:
    def test_elementary(self):
        rho = density.density_from_state(np.array([1.0, 0.0, 0.0, 0.0]))
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert np.array_equal(rho, expected)

    def test_uniform(self):
        rho = density.density_from_state(np.full(4, 0.5))
        assert np.abs(rho - 0.25).max() < 1e-15

    def test_trace_is_total_probability(self):
        a = np.sqrt(GENERIC_P)
        assert np.trace(density.density_from_state(a)) == pytest.approx(GENERIC_P.sum())

    def test_symmetry_preserved_along_evolution(self):
        traj = density.evolve_sqrt_trajectory(GENERIC_S4, GENERIC_P, 0.0, 2.0, 1e-3)
        for a in traj.states[::200]:
            rho = density.density_from_state(a)
            assert np.abs(rho - rho.T).max() <= 1e-12

    def test_rejects_negative_amplitudes(self):
        with pytest.raises(ValueError):
            density.density_from_state(np.array([0.5, -0.5, 0.5, 0.5]))


class TestDensityEom:
    def test_diagonal_rates(self):
        s = np.diag([0.2, -0.1, 0.05, -0.3])
        res = density.density_eom_residual(s, GENERIC_P, 1e-4)
        assert res.transpose_form <= 1e-8

    def test_symmetric_case_anticommutator(self):
        sym = 0.5 * (GENERIC_S4 + GENERIC_S4.T)
        res = density.density_eom_residual(sym, np.full(4, 0.25), 1e-4)
        assert res.transpose_form <= 1e-6
        assert res.anticommutator <= 1e-6

    def test_asymmetric_case_needs_the_transpose_form(self):
        res = density.density_eom_residual(GENERIC_S4, GENERIC_P, 1e-4)
        assert res.transpose_form <= 1e-6
        assert res.anticommutator > 1e-4


class TestReducedDensity:
    def test_product_state_factors(self):
        u = np.array([0.8, 0.6])
        v = np.array([0.6, 0.8])
        rho = density.density_from_state(np.kron(u, v))
        rho_a = density.reduced_density(rho, "A")
        rho_b = density.reduced_density(rho, "B")
        assert np.abs(rho_a - np.outer(u, u)).max() < 1e-12
        assert np.abs(rho_b - np.outer(v, v)).max() < 1e-12

    def test_maximally_mixed(self):
        rho = np.eye(4) / 4.0
        assert np.abs(density.reduced_density(rho, "A") - np.eye(2) / 2.0).max() < 1e-15
        assert np.abs(density.reduced_density(rho, "B") - np.eye(2) / 2.0).max() < 1e-15

    def test_bell_amplitudes(self):
        psi = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
        rho = np.outer(psi, psi)
        assert np.abs(density.reduced_density(rho, "A") - np.eye(2) / 2.0).max() < 1e-12
        assert np.abs(density.reduced_density(rho, "B") - np.eye(2) / 2.0).max() < 1e-12

    def test_unnormalized_input_is_normalized(self):
        rho = 3.0 * np.eye(4) / 4.0
        out = density.reduced_density(rho, "A")
        assert np.trace(out) == pytest.approx(1.0, abs=1e-12)

    def test_ordering_switch_swaps_subsystems(self):
        u = np.array([0.8, 0.6])
        v = np.array([0.6, 0.8])
        rho = density.density_from_state(np.kron(u, v))
        flipped = density.reduced_density(rho, "A", ordering="b_slow")
        assert np.abs(flipped - density.reduced_density(rho, "B")).max() < 1e-15

    def test_zero_trace(self):
        with pytest.raises(ZeroDivisionError):
            density.reduced_density(np.zeros((4, 4)), "A")


class TestEntropy:
    def test_pure(self):
        assert density.von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0

    def test_maximal_mixing(self):
        assert density.von_neumann_entropy(np.eye(2) / 2.0) == pytest.approx(np.log(2.0))

    def test_biased_mixture(self):
        expected = -(0.9 * np.log(0.9) + 0.1 * np.log(0.1))  # = 0.32508297339144845
        out = density.von_neumann_entropy(np.diag([0.9, 0.1]))
        assert out == pytest.approx(expected, abs=1e-15)
        assert out == pytest.approx(0.32508297339144845, abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(47)
        for _ in range(100):
            lam = rng.uniform(0.0, 1.0)
            angle = rng.uniform(0.0, np.pi)
            basis = np.array(
                [[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]]
            )
            rho = basis @ np.diag([lam, 1.0 - lam]) @ basis.T
            s = density.von_neumann_entropy(rho)
            assert 0.0 <= s <= np.log(2.0) + 1e-12

    def test_rejects_significant_negativity(self):
        with pytest.raises(ValueError):
            density.von_neumann_entropy(np.diag([1.1, -0.1]))

    def test_classical_pair_entropies_recorded_without_relation(self):
        # the classical construction does not promise S_A == S_B; both
        # values are finite, in range, and generally different
        a = np.sqrt(np.array([0.4, 0.3, 0.2, 0.1]))
        rho = density.density_from_state(a)
        s_a = density.von_neumann_entropy(density.reduced_density(rho, "A"))
        s_b = density.von_neumann_entropy(density.reduced_density(rho, "B"))
        for s in (s_a, s_b):
            assert 0.0 <= s <= np.log(2.0)
