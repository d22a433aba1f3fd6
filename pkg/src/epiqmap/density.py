"""Square-root-of-probability dynamics and the classical density matrix.

Writing a = sqrt(p) turns the linear master equation dp/dt = S p into a
Schrodinger-like equation da/dt = H(t, p) a with the state-dependent
generator H = (1/2) D(a)^-1 S D(a).  The transform is exact, so squaring
the evolved amplitudes must reproduce the master-equation flow; that
equivalence is used as a built-in consistency check.  The outer product
rho = a a^T plays the role of a density matrix: it is symmetric, its
diagonal carries the probabilities, and it obeys
d rho/dt = H rho + rho H^T (the anticommutator form exactly when H is
symmetric).
"""

from collections import namedtuple

import numpy as np

from . import numkit
from .errors import FloorViolationError

PROBABILITY_FLOOR = 1e-12

EomResiduals = namedtuple("EomResiduals", ["transpose_form", "anticommutator"])


def _rate_matrix(generator, t):
    if hasattr(generator, "matrix"):
        return generator.matrix(t)
    if callable(generator):
        return np.asarray(generator(t), dtype=float)
    return np.asarray(generator, dtype=float)


def _check_floor(p, floor, t=None):
    p = np.asarray(p, dtype=float)
    low = p.min()
    if low < floor:
        raise FloorViolationError(
            "probability %.3e below floor %.3e" % (low, floor),
            time=t, component=int(p.argmin()),
        )
    return p


def sqrt_dynamics_generator(generator, p, t=0.0, floor=PROBABILITY_FLOOR):
    """The amplitude-space generator H with entries (1/2) sqrt(pj/pi) s_ij.

    Requires every probability above the working floor: the transform is
    singular at extinction.
    """
    p = _check_floor(p, floor, t)
    s = _rate_matrix(generator, t)
    a = np.sqrt(p)
    return 0.5 * s * (a[None, :] / a[:, None])


def evolve_sqrt_trajectory(generator, p0, t0, t, dt, floor=PROBABILITY_FLOOR):
    """RK4 trajectory of the amplitudes a = sqrt(p) under H(t, p).

    The generator depends on the instantaneous state, so this is a
    self-consistent (nonlinear) integration even for constant S.
    """
    p0 = _check_floor(p0, floor, t0)
    a0 = np.sqrt(p0)

    def rhs(tau, a):
        return sqrt_dynamics_generator(generator, a * a, tau, floor) @ a

    return numkit.rk4_path(rhs, a0, t0, t, dt)


def evolve_sqrt(generator, p0, t0, t, dt, floor=PROBABILITY_FLOOR, check=True):
    """Evolve probabilities through the amplitude equation; returns p(t).

    With check=True the squared endpoint is compared against the direct
    master-equation flow and a discrepancy beyond 1e-6 raises, flagging
    a step-size problem; the transform itself is exact.
    """
    traj = evolve_sqrt_trajectory(generator, p0, t0, t, dt, floor)
    p_end = traj.final ** 2
    if check:
        ref = numkit.ode_evolve(
            lambda tau: _rate_matrix(generator, tau), p0, t0, t, dt
        ).final
        gap = np.abs(p_end - ref).max()
        if gap > 1e-6:
            raise RuntimeError(
                "sqrt-transform flow deviates from master equation by %.3e; "
                "reduce dt" % gap
            )
    return p_end


def density_from_state(a):
    """Rank-1 classical density rho = a a^T from an amplitude vector."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("amplitudes are principal square roots; must be >= 0")
    return np.outer(a, a)


def density_eom_residual(generator, p, h, dt=None, floor=PROBABILITY_FLOOR):
    """Finite-difference check of the density equation of motion at t = 0.

    Evolves the amplitudes to +/- h around the given state (constant
    generator), forms drho/dt by central differences, and compares it
    against H rho + rho H^T and against the literal anticommutator
    H rho + rho H.  Both residuals (max-norm) are returned; only the
    transpose form is exact for asymmetric H.
    """
    if dt is None:
        dt = h / 16.0
    p = _check_floor(p, floor)
    fwd = evolve_sqrt_trajectory(generator, p, 0.0, h, dt, floor).final
    bwd = evolve_sqrt_trajectory(generator, p, 0.0, -h, dt, floor).final
    drho = (density_from_state(fwd) - density_from_state(bwd)) / (2.0 * h)
    ham = sqrt_dynamics_generator(generator, p, 0.0, floor)
    rho = density_from_state(np.sqrt(p))
    transpose_form = np.abs(drho - (ham @ rho + rho @ ham.T)).max()
    anticommutator = np.abs(drho - (ham @ rho + rho @ ham)).max()
    return EomResiduals(float(transpose_form), float(anticommutator))


def reduced_density(rho, subsystem, ordering="a_slow"):
    """Normalized 2x2 reduced density of a 4x4 bipartite density matrix.

    ordering='a_slow' treats the 4-dimensional index as (A, B) with A
    varying slowest, the layout (1A1B, 1A2B, 2A1B, 2A2B); 'b_slow' swaps
    the roles of the two subsystems for states stored the other way.
    """
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 density matrix")
    if ordering == "b_slow":
        subsystem = {"A": "B", "B": "A"}[subsystem]
    if subsystem == "A":
        out = np.array(
            [
                [rho[0, 0] + rho[1, 1], rho[0, 2] + rho[1, 3]],
                [rho[2, 0] + rho[3, 1], rho[2, 2] + rho[3, 3]],
            ]
        )
    elif subsystem == "B":
        out = np.array(
            [
                [rho[0, 0] + rho[2, 2], rho[0, 1] + rho[2, 3]],
                [rho[1, 0] + rho[3, 2], rho[1, 1] + rho[3, 3]],
            ]
        )
    else:
        raise ValueError("subsystem must be 'A' or 'B'")
    trace = np.trace(rho)
    if abs(trace) <= 0:
        raise ZeroDivisionError("density matrix has zero trace")
    return out / trace


def von_neumann_entropy(rho2):
    """Entropy -sum(lam ln lam) of a 2x2 reduced density, in nats.

    Eigenvalues are clipped at zero; anything below -1e-8 is rejected as
    not positive semidefinite.  The sign convention makes the value
    nonnegative, 0 for pure states and ln 2 at maximal mixing.
    """
    rho2 = np.asarray(rho2)
    if rho2.shape != (2, 2):
        raise ValueError("expected a 2x2 density matrix")
    lams = np.linalg.eigvalsh(0.5 * (rho2 + np.conj(rho2.T)))
    if lams.min() < -1e-8:
        raise ValueError("density matrix has significantly negative eigenvalue %.3e" % lams.min())
    lams = np.clip(lams.real, 0.0, None)
    positive = lams[lams > 0]
    return float(-(positive * np.log(positive)).sum())
