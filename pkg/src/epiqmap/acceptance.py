"""The package's acceptance checks, shared by pytest and the CLI verifier.

Each criterion is a function returning a CheckResult made of subchecks;
a subcheck compares one measured number against its frozen tolerance.
Randomized checks draw from seeded generators so every run measures the
same ensemble.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import coupled, density, epidemic, mapping, numkit, quantum

SEED = 20260810

# brute-force reference for the dissipative norm ratio: uniform on-site
# loss of 0.1 on both qubits drains the pair norm at rate 0.4, so
# sum p(5)/sum p(0) = exp(-2)
DISSIPATION_RATIO_ORACLE = 0.1353352832366127


@dataclass(frozen=True)
class SubCheck:
    label: str
    value: float
    tolerance: float
    kind: str = "max"  # "max": value <= tolerance, "min": value >= tolerance

    @property
    def passed(self):
        if self.kind == "max":
            return self.value <= self.tolerance
        return self.value >= self.tolerance


@dataclass
class CheckResult:
    name: str
    description: str
    subchecks: list
    seconds: float = 0.0

    @property
    def passed(self):
        return all(s.passed for s in self.subchecks)


def _random_frame_generator(rng, symmetric=False):
    """A seeded 2x2 generator with a healthy closed-form spectral frame."""
    while True:
        s11, s12, s21, s22 = rng.uniform(-1.0, 1.0, size=4)
        if symmetric:
            s12 = s21
        disc = (s11 - s22) ** 2 + 4.0 * s12 * s21
        if disc < 1e-2 or abs(s21) < 1e-2:
            continue
        root = np.sqrt(disc)
        if min(abs(-root + s11 - s22 + 2 * s21), abs(root + s11 - s22 + 2 * s21)) < 1e-2:
            continue
        return epidemic.Generator2.constant(s11, s12, s21, s22)


def _batched_rk4_endpoint(generators, p0, t_span, dt):
    """Fixed-step RK4 on a batch of constant linear systems."""
    n_steps = int(round(t_span / dt))
    h = t_span / n_steps
    y = p0.copy()
    for _ in range(n_steps):
        k1 = np.einsum("nij,nj->ni", generators, y)
        k2 = np.einsum("nij,nj->ni", generators, y + 0.5 * h * k1)
        k3 = np.einsum("nij,nj->ni", generators, y + 0.5 * h * k2)
        k4 = np.einsum("nij,nj->ni", generators, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def check_propagator_closed_form():
    """Closed-form propagator vs fixed-step RK4 on random constant rates."""
    rng = np.random.default_rng(SEED)
    mats = rng.uniform(-1.0, 1.0, size=(100, 2, 2))
    p0 = rng.uniform(0.1, 0.9, size=(100, 2))
    reference = _batched_rk4_endpoint(mats, p0, 1.0, 1e-4)
    worst = 0.0
    for k in range(100):
        gen = epidemic.Generator2.constant(*mats[k].ravel())
        closed = epidemic.propagate_closed_form(gen, p0[k], 0.0, 1.0)
        worst = max(worst, float(np.abs(closed - reference[k]).max()))
    return [SubCheck("closed form vs RK4, 100 seeded generators", worst, 1e-8)]


def check_spectral_fidelity():
    """Closed-form eigenpairs against the matrix action, both sizes."""
    rng = np.random.default_rng(SEED + 1)
    worst2 = 0.0
    for _ in range(1000):
        gen = _random_frame_generator(rng)
        frame = epidemic.spectral_frame(gen, 0.0)
        m = gen.matrix(0.0)
        worst2 = max(
            worst2,
            float(np.abs(m @ frame.v1 - frame.e1 * frame.v1).max()),
            float(np.abs(m @ frame.v2 - frame.e2 * frame.v2).max()),
        )
    worst4 = 0.0
    drawn = 0
    while drawn < 200:
        s11, s12, s21, s22, s = rng.uniform(-1.0, 1.0, size=5)
        delta = s11 - s22
        if 4 * (s - s12) * (s - s21) + delta**2 < 1e-2:
            continue
        if 4 * (s + s12) * (s + s21) + delta**2 < 1e-2:
            continue
        if min(abs(2 * (s - s21)), abs(2 * (s + s21))) < 1e-2:
            continue
        gen4 = coupled.symmetric_traffic_generator(
            epidemic.Generator2.constant(s11, s12, s21, s22), s
        )
        m4 = gen4.matrix(0.0)
        for mode in coupled.coupled_eigenvectors(gen4, 0.0):
            worst4 = max(
                worst4, float(np.abs(m4 @ mode.vector - mode.value * mode.vector).max())
            )
        drawn += 1
    worst_orth = 0.0
    for _ in range(200):
        gen = _random_frame_generator(rng, symmetric=True)
        frame = epidemic.spectral_frame(gen, 0.0)
        worst_orth = max(worst_orth, abs(float(frame.v1 @ frame.v2)))
    witness = epidemic.spectral_frame(
        epidemic.Generator2.constant(0.5, 0.2, 0.8, -0.3), 0.0
    )
    witness_overlap = abs(float(witness.v1 @ witness.v2))
    return [
        SubCheck("2x2 closed-form residual", worst2, 1e-12),
        SubCheck("4x4 symmetric-coupled residual", worst4, 1e-10),
        SubCheck("overlap when s12 = s21", worst_orth, 1e-12),
        SubCheck("non-orthogonal witness overlap", witness_overlap, 1e-6, kind="min"),
    ]


def check_rabi_ratio():
    """log(pI/pII) affine in t with the norm-scaled eigenvalue gap slope."""
    rng = np.random.default_rng(SEED + 2)
    times = np.linspace(0.0, 1.0, 100)
    worst = 0.0
    for _ in range(20):
        gen = _random_frame_generator(rng)
        w0 = np.array([0.7, 0.4])
        logs = np.array(
            [np.log(np.divide(*epidemic.eigenmode_evolve_const(gen, w0, 0.0, t))) for t in times]
        )
        slope = np.polyfit(times, logs, 1)[0]
        worst = max(worst, abs(slope - epidemic.rabi_rate(gen)))
    return [SubCheck("fitted log-ratio slope error, 20 generators", worst, 1e-9)]


def check_ensemble_roundtrip():
    """Decompose into eigen-ensembles and reconstruct, symmetric coupling."""
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for _ in range(10):
        gen = _random_frame_generator(rng, symmetric=True)
        for _ in range(100):
            p = rng.uniform(0.0, 1.0, size=2)
            w = epidemic.ensemble_decompose(p, gen, 0.0)
            back = epidemic.ensemble_reconstruct(w, gen, 0.0)
            worst = max(worst, float(np.abs(back - p).max()))
    return [SubCheck("roundtrip error, 1000 seeded states", worst, 1e-12)]


_REFERENCE_S4 = np.array(
    [
        [-0.10, 0.30, 0.10, 0.05],
        [0.20, -0.15, 0.05, 0.10],
        [0.10, 0.05, -0.20, 0.30],
        [0.05, 0.20, 0.10, -0.25],
    ]
)


def check_sqrt_transform():
    """Squared amplitude flow equals the master-equation flow."""
    p0 = np.array([0.40, 0.30, 0.20, 0.10])
    traj = density.evolve_sqrt_trajectory(_REFERENCE_S4, p0, 0.0, 5.0, 1e-4)
    sample = slice(0, len(traj), 200)
    squared = traj.states[sample] ** 2
    worst = 0.0
    lowest = np.inf
    for t, p in zip(traj.times[sample], squared):
        ref = numkit.mat_exp(_REFERENCE_S4 * t) @ p0
        worst = max(worst, float(np.abs(p - ref).max()))
        lowest = min(lowest, float(ref.min()))
    return [
        SubCheck("squared sqrt-flow vs matrix-exponential flow", worst, 1e-8),
        SubCheck("probabilities stayed above 1e-6", lowest, 1e-6, kind="min"),
    ]


def check_density_eom():
    """d rho/dt against H rho + rho H^T (and the anticommutator when fair)."""
    p_generic = np.array([0.40, 0.30, 0.20, 0.10])
    generic = density.density_eom_residual(_REFERENCE_S4, p_generic, 1e-4)
    sym = 0.5 * (_REFERENCE_S4 + _REFERENCE_S4.T)
    uniform = np.full(4, 0.25)
    symmetric = density.density_eom_residual(sym, uniform, 1e-4)
    return [
        SubCheck("transpose-form residual, generic rates", generic.transpose_form, 1e-6),
        SubCheck("anticommutator residual, symmetric case", symmetric.anticommutator, 1e-6),
    ]


def check_entanglement_entropy():
    """Subsystem entropy symmetry, Bell value, and product-state zeros."""
    rng = np.random.default_rng(SEED + 4)
    worst_pair = 0.0
    for _ in range(50):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        s_a, s_b = quantum.pure_entropy_pair(psi)
        worst_pair = max(worst_pair, abs(s_a - s_b))
    bell = quantum.pure_entropy_pair(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0))
    bell_gap = max(abs(bell[0] - np.log(2.0)), abs(bell[1] - np.log(2.0)))
    worst_product = 0.0
    for _ in range(20):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        s_a, s_b = quantum.pure_entropy_pair(np.kron(u, v))
        worst_product = max(worst_product, s_a, s_b)
    params = quantum.QubitPairHamiltonian.hermitian(
        1.05, 0.95, 1.02, 0.98, 0.1, 0.12, 0.0, 0.0, 0.0, 0.0
    )
    psi0 = np.kron(
        np.array([0.8, 0.6], dtype=complex), np.array([0.6, 0.8j], dtype=complex)
    )
    traj = quantum.evolve_schrodinger(params, psi0, 0.0, 5.0, 1e-3)
    worst_drift = 0.0
    for state in traj.states[::50]:
        s_a, _ = quantum.pure_entropy_pair(state)
        worst_drift = max(worst_drift, s_a)
    return [
        SubCheck("|S_A - S_B| over random pure states", worst_pair, 1e-9),
        SubCheck("Bell-analog entropy vs ln 2", bell_gap, 1e-9),
        SubCheck("product-state entropy", worst_product, 1e-9),
        SubCheck("S_A under non-interacting evolution", worst_drift, 1e-9),
    ]


def _reference_hermitian_params():
    return quantum.QubitPairHamiltonian.hermitian(
        1.05, 0.95, 1.05, 0.95, 0.1, 0.1, 0.05, 0.10, 0.15, 0.20
    )


def _reference_psi0():
    return quantum.wave_from_polar(
        [0.30, 0.20, 0.25, 0.25], [0.30, 1.00, -0.40, 0.80]
    )


def check_quantum_unitarity():
    """Norm and energy conservation of the Hermitian pair Hamiltonian."""
    params = _reference_hermitian_params()
    h = quantum.build_hamiltonian(params)
    psi0 = _reference_psi0()
    traj = quantum.evolve_schrodinger(h, psi0, 0.0, 10.0, 1e-3)
    norms = np.abs(traj.states) ** 2
    norm_drift = float(np.abs(norms.sum(axis=1) - 1.0).max())
    e0 = quantum.expectation_energy(h, psi0).real
    energy_drift = max(
        abs(quantum.expectation_energy(h, state).real - e0)
        for state in traj.states[::100]
    )
    return [
        SubCheck("norm drift over t in [0, 10]", norm_drift, 1e-9),
        SubCheck("energy drift over t in [0, 10]", energy_drift, 1e-8),
    ]


def check_mapping_certificate():
    """The 2N classical image certifies the quantum trajectory."""
    params = _reference_hermitian_params()
    report = mapping.verify_equivalence(params, _reference_psi0(), 0.0, 5.0, 1e-3)
    h4 = quantum.build_hamiltonian(params)
    h2 = np.array([[1.0, 0.1 + 0.05j], [0.1 - 0.05j, 0.9]])
    psi2 = np.array([0.8, 0.6j])
    worst_embed = 0.0
    for h, psi in ((h2, psi2), (h4, _reference_psi0())):
        complex_traj = quantum.evolve_schrodinger(h, psi, 0.0, 5.0, 1e-3)
        real_traj = mapping.evolve_real_form(h, psi, 0.0, 5.0, 1e-3)
        rebuilt = real_traj.states[:, 0::2] + 1j * real_traj.states[:, 1::2]
        worst_embed = max(worst_embed, float(np.abs(rebuilt - complex_traj.states).max()))
    dims_ok = (
        mapping.real_form_generator(h2).shape == (4, 4)
        and mapping.real_form_generator(h4).shape == (8, 8)
    )
    return [
        SubCheck("max ||dx/dt - S x|| outside crossings", report.max_residual, 1e-6),
        SubCheck("split consistency x_re + x_im = p", report.split_consistency_gap, 1e-10),
        SubCheck("real-form embedding rebuilds psi (N=2,4)", worst_embed, 1e-8),
        SubCheck("generator dimension is 2N", float(dims_ok), 1.0, kind="min"),
    ]


def check_dissipation():
    """Uniform on-site loss drains total probability monotonically."""
    params = quantum.QubitPairHamiltonian(
        ep_1a=1.05 - 0.1j, ep_2a=0.95 - 0.1j, ep_1b=1.05 - 0.1j, ep_2b=0.95 - 0.1j,
        ts_a_12=0.1, ts_a_21=0.1, ts_b_12=0.1, ts_b_21=0.1,
        ec_11=0.05, ec_12=0.10, ec_21=0.15, ec_22=0.20,
    )
    report = mapping.verify_equivalence(params, _reference_psi0(), 0.0, 5.0, 1e-3)
    ratio = float(report.total_probability[-1] / report.total_probability[0])
    return [
        SubCheck("largest upward step of sum p", report.monotonicity_defect, 0.0),
        SubCheck("sum p(5) / sum p(0) below 0.95", ratio, 0.95),
        SubCheck("norm ratio vs brute-force value", abs(ratio - DISSIPATION_RATIO_ORACLE), 1e-6),
    ]


def check_aharonov_bohm():
    """Phase bookkeeping and gauge invariance of the site potential."""
    theta = np.array([0.3, 1.0, -0.4, 0.8])
    ident = mapping.apply_aharonov_bohm(theta, mapping.SitePotential())
    ident_gap = float(np.abs(ident - theta).max())
    local = mapping.apply_aharonov_bohm(
        theta, mapping.SitePotential(a_1a=0.7, dot_diameter=1.0, e_over_hbar=1.0)
    )
    shifts = local - theta
    local_gap = float(
        max(abs(shifts[0] - 0.7), abs(shifts[1] - 0.7), abs(shifts[2]), abs(shifts[3]))
    )
    params = _reference_hermitian_params()
    h = quantum.build_hamiltonian(params)
    p0 = np.array([0.30, 0.20, 0.25, 0.25])
    shifted = mapping.apply_aharonov_bohm(
        theta, mapping.SitePotential(0.4, 0.4, 0.4, 0.4, dot_diameter=0.5)
    )
    base_traj = quantum.evolve_schrodinger(h, quantum.wave_from_polar(p0, theta), 0.0, 5.0, 1e-3)
    shift_traj = quantum.evolve_schrodinger(h, quantum.wave_from_polar(p0, shifted), 0.0, 5.0, 1e-3)
    prob_gap = float(
        np.abs(np.abs(base_traj.states) ** 2 - np.abs(shift_traj.states) ** 2).max()
    )
    return [
        SubCheck("zero potential is the identity", ident_gap, 0.0),
        SubCheck("site-local shift hits exactly two phases", local_gap, 1e-15),
        SubCheck("global potential leaves probabilities invariant", prob_gap, 1e-8),
    ]


def check_measurement_semantics():
    """Projective after-states, the weak update, and back-action."""
    p4 = np.array([0.32, 0.68, 0.55, 0.45])
    after_gap = 0.0
    expectations = {
        "1A": np.array([1.0, 0.0, 0.55, 0.45]),
        "2A": np.array([0.0, 1.0, 0.55, 0.45]),
        "1B": np.array([0.32, 0.68, 1.0, 0.0]),
        "2B": np.array([0.32, 0.68, 0.0, 1.0]),
    }
    for target, expected in expectations.items():
        after_gap = max(
            after_gap, float(np.abs(coupled.measure_subsystem(p4, target) - expected).max())
        )
    weak = epidemic.measure_weak(np.array([0.5, 0.5]), 100, 20, np.array([1.0, 0.0]))
    weak_gap = float(np.abs(weak - np.array([0.6, 0.4])).max())
    gen4 = coupled.build_traffic_generator(
        epidemic.Generator2.constant(0.0, 0.4, 0.3, -0.1),
        epidemic.Generator2.constant(-0.2, 0.3, 0.5, 0.0),
        (0.3, 0.25, 0.35, 0.2),
    )
    p0 = np.array([0.6, 0.4, 0.5, 0.5])
    free = numkit.ode_evolve(gen4.matrix, p0, 0.0, 1.0, 1e-3).final
    measured_start = coupled.measure_subsystem(free, "1A")
    branch_measured = numkit.ode_evolve(gen4.matrix, measured_start, 1.0, 2.0, 1e-3).final
    branch_free = numkit.ode_evolve(gen4.matrix, free, 1.0, 2.0, 1e-3).final
    divergence = float(np.abs(branch_measured[2:] - branch_free[2:]).max())
    return [
        SubCheck("projective after-states", after_gap, 0.0),
        SubCheck("weak-measurement update", weak_gap, 1e-15),
        SubCheck("B-trajectory back-action divergence", divergence, 1e-6, kind="min"),
    ]


CRITERIA = (
    ("propagator_closed_form", check_propagator_closed_form,
     "closed-form propagator matches RK4 within 1e-8"),
    ("spectral_fidelity", check_spectral_fidelity,
     "closed-form eigenpairs and conditional orthogonality"),
    ("rabi_ratio", check_rabi_ratio,
     "log weight ratio affine with slope e1/n1 - e2/n2"),
    ("ensemble_roundtrip", check_ensemble_roundtrip,
     "eigen-ensemble decompose/reconstruct to 1e-12"),
    ("sqrt_transform", check_sqrt_transform,
     "squared amplitude flow equals master-equation flow"),
    ("density_eom", check_density_eom,
     "density equation of motion residuals"),
    ("entanglement_entropy", check_entanglement_entropy,
     "pure-state entropy symmetry, Bell value, product zeros"),
    ("quantum_unitarity", check_quantum_unitarity,
     "Hermitian evolution conserves norm and energy"),
    ("mapping_certificate", check_mapping_certificate,
     "2N classical image certifies the quantum trajectory"),
    ("dissipation", check_dissipation,
     "complex on-site energies drain total probability"),
    ("aharonov_bohm", check_aharonov_bohm,
     "vector-potential phase shifts and gauge invariance"),
    ("measurement_semantics", check_measurement_semantics,
     "projective, weak, and back-action measurement behavior"),
)


def run_criteria(name_filter=None):
    """Run all (or the matching) criteria; returns a list of CheckResult."""
    results = []
    for name, func, description in CRITERIA:
        if name_filter and name_filter not in name:
            continue
        start = time.perf_counter()
        subchecks = func()
        results.append(
            CheckResult(name, description, subchecks, time.perf_counter() - start)
        )
    return results


def format_results(results):
    lines = []
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        lines.append("[%s] %s (%.2fs) - %s" % (status, result.name, result.seconds, result.description))
        for sub in result.subchecks:
            op = "<=" if sub.kind == "max" else ">="
            lines.append(
                "       %-48s %.3e %s %.3e  %s"
                % (sub.label, sub.value, op, sub.tolerance, "ok" if sub.passed else "FAIL")
            )
    return "\n".join(lines)
