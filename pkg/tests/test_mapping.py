import numpy as np
import pytest

from epiqmap import mapping, numkit, quantum
from epiqmap.errors import FloorViolationError


def hermitian_params():
    return quantum.QubitPairHamiltonian.hermitian(
        1.05, 0.95, 1.05, 0.95, 0.1, 0.1, 0.05, 0.10, 0.15, 0.20
    )


REFERENCE_PSI0 = quantum.wave_from_polar([0.3, 0.2, 0.25, 0.25], [0.3, 1.0, -0.4, 0.8])


class TestSplitState:
    def test_zero_phase(self):
        p = np.array([0.4, 0.3, 0.2, 0.1])
        x = mapping.split_state(p, np.zeros(4))
        assert np.array_equal(x[0::2], p)
        assert np.abs(x[1::2]).max() == 0.0

    def test_quarter_turn_puts_weight_on_imaginary_slots(self):
        p = np.array([0.4, 0.3, 0.2, 0.1])
        x = mapping.split_state(p, np.full(4, np.pi / 2.0))
        assert np.abs(x[0::2]).max() < 1e-30
        assert np.abs(x[1::2] - p).max() < 1e-15

    def test_diagonal_phase_splits_evenly(self):
        x = mapping.split_state(np.full(4, 0.25), np.full(4, np.pi / 4.0))
        assert np.abs(x - 0.125).max() < 1e-15

    def test_pair_sums_recover_probabilities(self):
        rng = np.random.default_rng(61)
        p = rng.uniform(0.0, 1.0, size=4)
        theta = rng.uniform(-np.pi, np.pi, size=4)
        x = mapping.split_state(p, theta)
        assert np.abs(x[0::2] + x[1::2] - p).max() <= 1e-15


class TestPhaseFromSplit:
    def test_diagonal_phase(self):
        x = mapping.split_state(np.full(4, 0.25), np.full(4, np.pi / 4.0))
        _, tan2 = mapping.phase_from_split(x)
        assert np.abs(tan2 - 1.0).max() < 1e-12

    def test_roundtrip(self):
        rng = np.random.default_rng(67)
        for _ in range(100):
            p = rng.uniform(0.1, 1.0, size=4)
            theta = rng.uniform(0.05, np.pi / 2.0 - 0.05, size=4)
            x = mapping.split_state(p, theta)
            p_rec, tan2 = mapping.phase_from_split(x)
            assert np.abs(p_rec - p).max() <= 1e-12
            assert np.abs(tan2 - np.tan(theta) ** 2).max() <= 1e-12 * max(
                1.0, np.abs(np.tan(theta) ** 2).max()
            )

    def test_zero_phase(self):
        x = mapping.split_state(np.array([0.5, 0.5, 0.5, 0.5]), np.zeros(4))
        _, tan2 = mapping.phase_from_split(x)
        assert np.abs(tan2).max() == 0.0

    def test_floor_marks_infinite_tangent(self):
        x = mapping.split_state(np.full(4, 0.25), np.full(4, np.pi / 2.0))
        _, tan2 = mapping.phase_from_split(x)
        assert np.all(np.isinf(tan2))


class TestRealFormGenerator:
    def test_two_level_block_layout(self):
        e1, e2, t_r, t_i = 1.2, 0.7, 0.3, 0.15
        h = np.array([[e1, t_r + 1j * t_i], [t_r - 1j * t_i, e2]])
        a = mapping.real_form_generator(h)
        expected = np.array(
            [
                [0.0, e1, t_i, t_r],
                [-e1, 0.0, -t_r, t_i],
                [-t_i, t_r, 0.0, e2],
                [-t_r, -t_i, -e2, 0.0],
            ]
        )
        assert np.abs(a - expected).max() < 1e-15

    def test_free_phase_rotation_traces_a_circle(self):
        energy = 1.5
        h = np.array([[energy]], dtype=complex)
        # dimension 1 is not supported; embed as an uncoupled 2-level
        h2 = np.diag([energy, 0.0]).astype(complex)
        psi0 = np.array([np.sqrt(0.7), np.sqrt(0.3)], dtype=complex)
        traj = mapping.evolve_real_form(h2, psi0, 0.0, 4.0, 1e-3)
        radii = np.hypot(traj.states[:, 0], traj.states[:, 1])
        assert np.abs(radii - np.sqrt(0.7)).max() < 1e-10
        angles = np.unwrap(np.arctan2(traj.states[:, 1], traj.states[:, 0]))
        slope = np.polyfit(traj.times, angles, 1)[0]
        assert slope == pytest.approx(-energy, abs=1e-8)

    def test_real_hopping_gives_antisymmetric_flow(self):
        t_r = 0.4
        h = np.array([[0.0, t_r], [t_r, 0.0]], dtype=complex)
        a = mapping.real_form_generator(h)
        assert np.abs(a + a.T).max() < 1e-15
        psi0 = np.array([0.8, 0.6j])
        traj = mapping.evolve_real_form(h, psi0, 0.0, 10.0, 1e-3)
        norms = np.linalg.norm(traj.states, axis=1)
        assert np.abs(norms - 1.0).max() <= 1e-10

    def test_four_level_embedding_matches_schrodinger(self):
        h = quantum.build_hamiltonian(hermitian_params())
        complex_traj = quantum.evolve_schrodinger(h, REFERENCE_PSI0, 0.0, 5.0, 1e-3)
        real_traj = mapping.evolve_real_form(h, REFERENCE_PSI0, 0.0, 5.0, 1e-3)
        rebuilt = real_traj.states[:, 0::2] + 1j * real_traj.states[:, 1::2]
        assert np.abs(rebuilt - complex_traj.states).max() <= 1e-8

    def test_dimension_law_and_limits(self):
        assert mapping.real_form_generator(np.eye(2, dtype=complex)).shape == (4, 4)
        assert mapping.real_form_generator(np.eye(4, dtype=complex)).shape == (8, 8)
        with pytest.raises(ValueError):
            mapping.real_form_generator(np.eye(3, dtype=complex))


class TestBuildS8:
    def test_truly_stationary_state_is_a_fixed_point(self):
        h = quantum.build_hamiltonian(hermitian_params())
        values, vectors = numkit.eig(h)
        # shift the spectrum so one eigenstate has eigenvalue zero and is
        # genuinely time independent; rotate it off the real axis so no
        # split component vanishes
        shifted = h - values[1].real * np.eye(4)
        psi = vectors[:, 1] * np.exp(1j * 0.7)
        s8 = mapping.build_s8(shifted, psi)
        x = mapping.split_state(np.abs(psi) ** 2, np.angle(psi))
        assert np.abs(s8 @ x).max() <= 1e-8

    def test_finite_difference_oracle_along_trajectory(self):
        h = quantum.build_hamiltonian(hermitian_params())
        traj = quantum.evolve_schrodinger(h, REFERENCE_PSI0, 0.0, 0.1, 1e-4)
        states = traj.states
        x = np.empty((len(states), 8))
        x[:, 0::2] = states.real**2
        x[:, 1::2] = states.imag**2
        dt = traj.times[1] - traj.times[0]
        for i in range(1, len(states) - 1, 100):
            dx = (x[i + 1] - x[i - 1]) / (2.0 * dt)
            s8 = mapping.build_s8(h, states[i])
            assert np.abs(dx - s8 @ x[i]).max() <= 1e-6

    def test_block_diagonal_when_hoppings_vanish(self):
        params = quantum.QubitPairHamiltonian(
            ep_1a=1.0, ep_2a=0.8, ep_1b=1.2, ep_2b=0.9,
            ts_a_12=0.0, ts_a_21=0.0, ts_b_12=0.0, ts_b_21=0.0,
            ec_11=0.05, ec_12=0.10, ec_21=0.15, ec_22=0.20,
        )
        psi = quantum.wave_from_polar([0.3, 0.2, 0.25, 0.25], [0.3, 1.0, -0.4, 0.8])
        s8 = mapping.build_s8(params, psi)
        for i in range(4):
            for j in range(4):
                block = s8[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
                if i != j:
                    assert np.abs(block).max() == 0.0
                else:
                    assert block[0, 0] == 0.0
                    assert block[1, 1] == 0.0
                    assert block[0, 1] * block[1, 0] < 0.0

    def test_dissipative_sites_enter_the_diagonal(self):
        params = quantum.QubitPairHamiltonian(
            ep_1a=1.0 - 0.1j, ep_2a=1.0 - 0.1j, ep_1b=1.0 - 0.1j, ep_2b=1.0 - 0.1j,
            ts_a_12=0.0, ts_a_21=0.0, ts_b_12=0.0, ts_b_21=0.0,
            ec_11=0.0, ec_12=0.0, ec_21=0.0, ec_22=0.0,
        )
        psi = quantum.wave_from_polar([0.3, 0.2, 0.25, 0.25], [0.3, 1.0, -0.4, 0.8])
        s8 = mapping.build_s8(params, psi)
        assert np.allclose(np.diag(s8), -0.4)

    def test_floor_violation_for_real_state(self):
        h = quantum.build_hamiltonian(hermitian_params())
        psi = np.array([0.5, 0.5, 0.5, 0.5], dtype=complex)  # all phases zero
        with pytest.raises(FloorViolationError):
            mapping.build_s8(h, psi)


class TestAharonovBohm:
    def test_zero_potential_identity(self):
        theta = np.array([0.3, 1.0, -0.4, 0.8])
        out = mapping.apply_aharonov_bohm(theta, mapping.SitePotential())
        assert np.array_equal(out, theta)

    def test_uniform_potential_shifts_all_phases_equally(self):
        theta = np.array([0.3, 1.0, -0.4, 0.8])
        pot = mapping.SitePotential(0.4, 0.4, 0.4, 0.4, dot_diameter=0.5, e_over_hbar=2.0)
        out = mapping.apply_aharonov_bohm(theta, pot)
        assert np.abs(out - theta - 0.8).max() < 1e-15

    def test_site_locality(self):
        theta = np.zeros(4)
        out = mapping.apply_aharonov_bohm(theta, mapping.SitePotential(a_1a=0.7))
        assert np.array_equal(out, [0.7, 0.7, 0.0, 0.0])
        out_b = mapping.apply_aharonov_bohm(theta, mapping.SitePotential(a_2b=0.3))
        assert np.array_equal(out_b, [0.0, 0.3, 0.0, 0.3])

    def test_sum_arithmetic(self):
        pot = mapping.SitePotential(0.1, 0.2, 0.3, 0.4, dot_diameter=2.0, e_over_hbar=1.5)
        out = mapping.apply_aharonov_bohm(np.zeros(4), pot)
        expected = 3.0 * np.array([0.4, 0.5, 0.5, 0.6])
        assert np.abs(out - expected).max() < 1e-14

    def test_global_shift_leaves_probabilities_invariant(self):
        h = quantum.build_hamiltonian(hermitian_params())
        p0 = np.array([0.3, 0.2, 0.25, 0.25])
        theta = np.array([0.3, 1.0, -0.4, 0.8])
        shifted = mapping.apply_aharonov_bohm(theta, mapping.SitePotential(0.4, 0.4, 0.4, 0.4))
        base = quantum.evolve_schrodinger(h, quantum.wave_from_polar(p0, theta), 0.0, 3.0, 1e-3)
        moved = quantum.evolve_schrodinger(h, quantum.wave_from_polar(p0, shifted), 0.0, 3.0, 1e-3)
        assert np.abs(np.abs(base.states) ** 2 - np.abs(moved.states) ** 2).max() <= 1e-8


class TestVerifyEquivalence:
    def test_hermitian_reference_certificate(self):
        report = mapping.verify_equivalence(hermitian_params(), REFERENCE_PSI0, 0.0, 2.0, 1e-3)
        assert report.hermitian
        assert report.max_residual <= 1e-6
        assert report.split_consistency_gap <= 1e-10
        assert report.phase_recovery_gap <= 1e-9
        assert report.norm_drift <= 1e-9
        assert report.checked_samples > 0

    def test_dissipative_monotone_decay(self):
        params = quantum.QubitPairHamiltonian(
            ep_1a=1.05 - 0.1j, ep_2a=0.95 - 0.1j, ep_1b=1.05 - 0.1j, ep_2b=0.95 - 0.1j,
            ts_a_12=0.1, ts_a_21=0.1, ts_b_12=0.1, ts_b_21=0.1,
            ec_11=0.05, ec_12=0.10, ec_21=0.15, ec_22=0.20,
        )
        report = mapping.verify_equivalence(params, REFERENCE_PSI0, 0.0, 5.0, 1e-3)
        assert not report.hermitian
        assert report.monotonicity_defect == 0.0
        assert report.total_probability[-1] < 0.95 * report.total_probability[0]
        assert report.max_residual <= 1e-6

    def test_zero_hamiltonian(self):
        report = mapping.verify_equivalence(np.zeros((4, 4), dtype=complex),
                                            REFERENCE_PSI0, 0.0, 1.0, 1e-2)
        assert report.max_residual <= 1e-12
        assert report.norm_drift <= 1e-12

    def test_amplitude_wave_roundtrip(self):
        y = mapping.amplitude_vector([0.4, 0.3, 0.2, 0.1], [0.1, 0.7, -0.2, 2.5])
        psi = mapping.wave_from_amplitudes(y)
        assert np.abs(mapping.amplitudes_from_wave(psi) - y).max() < 1e-15
