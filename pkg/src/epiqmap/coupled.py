"""Two coupled 2-level classical machines on a 4-state space.

Two bases are in play and both are supported with explicit conversion:

* traffic basis  (pA1, pA2, pB1, pB2): each subsystem's occupancies are
  stacked, and cross couplings sit on the anti-diagonal positions
  (1,4), (2,3), (3,2), (4,1);
* product basis  (p1A p1B, p1A p2B, p2A p1B, p2A p2B): joint occupancies
  of the pair, the natural home of the Kronecker-sum generator of two
  non-interacting machines.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .epidemic import Generator2, Rate, as_rate
from .errors import ComplexSpectrumError

_DENOM_FLOOR = 1e-10

TRAFFIC_TARGETS = ("1A", "2A", "1B", "2B")
PRODUCT_STATES = ("1A1B", "1A2B", "2A1B", "2A2B")

# product-basis transitions that carry a coupling rate: the eight
# single-subsystem flips plus the two simultaneous double flips
ALLOWED_TRANSITIONS = (
    ("1A1B", "1A2B"), ("1A2B", "1A1B"),
    ("1A1B", "2A1B"), ("2A1B", "1A1B"),
    ("1A2B", "2A2B"), ("2A2B", "1A2B"),
    ("2A1B", "2A2B"), ("2A2B", "2A1B"),
    ("1A1B", "2A2B"), ("2A2B", "1A1B"),
)


@dataclass(frozen=True)
class Generator4:
    """Time-dependent 4x4 rate matrix with a record of how it was built."""

    form: str
    basis: str
    entries: np.ndarray  # 4x4 object array of Rate
    params: dict = field(default_factory=dict)

    def matrix(self, t):
        m = np.array([[rate(t) for rate in row] for row in self.entries], dtype=float)
        if not np.all(np.isfinite(m)):
            raise ValueError("generator entries not finite at t = %r" % (t,))
        return m

    @property
    def is_constant(self):
        return all(rate.is_constant for rate in self.entries.ravel())


def _zero_rate():
    return Rate(0.0)


def _entries_from_grid(grid):
    out = np.empty((4, 4), dtype=object)
    for i in range(4):
        for j in range(4):
            out[i, j] = as_rate(grid[i][j])
    return out


def build_traffic_generator(gen_a, gen_b, cross):
    """Couple two 2-level generators with four independent cross rates.

    cross lists the rates for positions (1,4), (2,3), (3,2), (4,1) in
    that order (1-indexed, traffic basis).
    """
    if not (isinstance(gen_a, Generator2) and isinstance(gen_b, Generator2)):
        raise TypeError("gen_a and gen_b must be Generator2")
    c14, c23, c32, c41 = [as_rate(c) for c in cross]
    grid = [
        [gen_a.s11, gen_a.s12, _zero_rate(), c14],
        [gen_a.s21, gen_a.s22, c23, _zero_rate()],
        [_zero_rate(), c32, gen_b.s11, gen_b.s12],
        [c41, _zero_rate(), gen_b.s21, gen_b.s22],
    ]
    return Generator4(
        form="traffic", basis="traffic", entries=_entries_from_grid(grid),
        params={"gen_a": gen_a, "gen_b": gen_b, "cross": (c14, c23, c32, c41)},
    )


def symmetric_traffic_generator(gen, coupling):
    """Two identical subsystems with one common cross-coupling rate."""
    if not isinstance(gen, Generator2):
        raise TypeError("gen must be Generator2")
    s = as_rate(coupling)
    out = build_traffic_generator(gen, gen, (s, s, s, s))
    return Generator4(
        form="symmetric", basis="traffic", entries=out.entries,
        params={"gen": gen, "coupling": s},
    )


def kron_sum_generator(gen_a, gen_b):
    """Kronecker sum S_A (x) I + I (x) S_B of two non-interacting machines."""
    if not (isinstance(gen_a, Generator2) and isinstance(gen_b, Generator2)):
        raise TypeError("gen_a and gen_b must be Generator2")

    def entry(i, j):
        ia, ja = i // 2, j // 2
        ib, jb = i % 2, j % 2
        def rate(t, ia=ia, ja=ja, ib=ib, jb=jb):
            val = 0.0
            if ib == jb:
                val += gen_a.matrix(t)[ia, ja]
            if ia == ja:
                val += gen_b.matrix(t)[ib, jb]
            return val
        if gen_a.is_constant and gen_b.is_constant:
            return Rate(rate(0.0))
        return Rate(rate)

    grid = [[entry(i, j) for j in range(4)] for i in range(4)]
    return Generator4(
        form="kron_sum", basis="product", entries=_entries_from_grid(grid),
        params={"gen_a": gen_a, "gen_b": gen_b},
    )


def interaction_generator(level_rates, couplings, frame_a, frame_b):
    """General pair interaction assembled in the product eigenbasis.

    level_rates: four diagonal rates for the product states, in the
    order of PRODUCT_STATES.  couplings: mapping (source, destination)
    -> rate for transitions in ALLOWED_TRANSITIONS (the coupling enters
    the matrix at row destination, column source).  frame_a, frame_b:
    orthonormal 2x2 frames (eigenvector columns) used to conjugate the
    eigenbasis matrix into the physical product basis.
    """
    frame_a = np.asarray(frame_a, dtype=float)
    frame_b = np.asarray(frame_b, dtype=float)
    for name, f in (("frame_a", frame_a), ("frame_b", frame_b)):
        if np.abs(f.T @ f - np.eye(2)).max() > 1e-10:
            raise ValueError("%s is not orthonormal" % name)
    diag = [as_rate(r) for r in level_rates]
    if len(diag) != 4:
        raise ValueError("expected four level rates")
    coupling_rates = {}
    for key, value in couplings.items():
        if tuple(key) not in ALLOWED_TRANSITIONS:
            raise ValueError("unsupported transition %r" % (key,))
        coupling_rates[tuple(key)] = as_rate(value)
    index = {name: k for k, name in enumerate(PRODUCT_STATES)}
    basis_change = np.kron(frame_a, frame_b)

    def eigenbasis_matrix(t):
        m = np.diag([r(t) for r in diag])
        for (src, dst), rate in coupling_rates.items():
            m[index[dst], index[src]] = rate(t)
        return m

    def physical_entry(i, j):
        def rate(t, i=i, j=j):
            return (basis_change @ eigenbasis_matrix(t) @ basis_change.T)[i, j]
        return Rate(rate)

    grid = [[physical_entry(i, j) for j in range(4)] for i in range(4)]
    return Generator4(
        form="interaction", basis="product", entries=_entries_from_grid(grid),
        params={
            "level_rates": diag,
            "couplings": coupling_rates,
            "frame_a": frame_a,
            "frame_b": frame_b,
            "eigenbasis_matrix": eigenbasis_matrix,
        },
    )


# ---------------------------------------------------------------------------
# closed-form eigenvectors of the symmetric traffic form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoupledMode:
    """One closed-form eigenpair of the symmetric 4-state generator.

    physical marks the modes whose components carry one consistent sign
    pattern for occupancies; the other two are kept for completeness but
    flagged sign_indefinite.
    """

    value: float
    vector: np.ndarray
    sign_indefinite: bool
    numeric_fallback: bool = False


def coupled_eigenvectors(gen4, t):
    """The four closed-form eigenvectors of a symmetric traffic generator.

    Vectors keep their unnormalized printed scale (last component 1,
    second component -1 or 1).  Eigenvalues are recovered from the
    vectors by Rayleigh quotient.  Falls back to a numeric
    decomposition, flagged, when a closed-form denominator underflows.
    """
    if gen4.form != "symmetric":
        raise ValueError("closed-form modes require the symmetric constructor")
    m = gen4.matrix(t)
    gen = gen4.params["gen"]
    s = gen4.params["coupling"](t)
    g2 = gen.matrix(t)
    s11, s12 = g2[0]
    s21, s22 = g2[1]
    delta = s11 - s22
    x_minus = 4.0 * (s - s12) * (s - s21) + delta * delta
    x_plus = 4.0 * (s + s12) * (s + s21) + delta * delta
    if x_minus < 0 or x_plus < 0:
        raise ComplexSpectrumError(min(x_minus, x_plus))
    den_minus = 2.0 * (s - s21)
    den_plus = 2.0 * (s + s21)
    scale = max(1.0, np.abs(m).max())
    if min(abs(den_minus), abs(den_plus)) < _DENOM_FLOOR * scale:
        values, vectors = numkit.eig(m)
        modes = []
        for k in range(4):
            vec = vectors[:, k].real
            modes.append(CoupledMode(float(values[k].real), vec, False, True))
        return modes

    r_minus = np.sqrt(x_minus)
    r_plus = np.sqrt(x_plus)
    v1 = np.array([(delta - r_minus) / den_minus, -1.0, (r_minus - delta) / den_minus, 1.0])
    v2 = np.array([(r_minus + delta) / den_minus, -1.0, -(r_minus + delta) / den_minus, 1.0])
    v3 = np.array([(delta - r_plus) / den_plus, 1.0, (delta - r_plus) / den_plus, 1.0])
    v4 = np.array([(r_plus + delta) / den_plus, 1.0, (r_plus + delta) / den_plus, 1.0])
    modes = []
    for vec, indefinite in ((v1, True), (v2, True), (v3, False), (v4, False)):
        value = float(vec @ m @ vec / (vec @ vec))
        modes.append(CoupledMode(value, vec, indefinite))
    return modes


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

_PROJECTOR_DIAGS = {
    "1A": (1.0, 0.0, 1.0, 1.0),
    "2A": (0.0, 1.0, 1.0, 1.0),
    "1B": (1.0, 1.0, 1.0, 0.0),
    "2B": (1.0, 1.0, 0.0, 1.0),
}

_AFTER_STATES = {
    "1A": ((1.0, 0.0), None),
    "2A": ((0.0, 1.0), None),
    "1B": (None, (1.0, 0.0)),
    "2B": (None, (0.0, 1.0)),
}


def projector(target):
    """The printed diagonal projector for one measurement target.

    Note these are idempotent but NOT complementary in 4 dimensions:
    projector('1A') + projector('2A') != identity.
    """
    if target not in _PROJECTOR_DIAGS:
        raise ValueError("unknown measurement target %r" % (target,))
    return np.diag(_PROJECTOR_DIAGS[target])


def measure_subsystem(p, target):
    """Collapse one subsystem of a traffic-basis state.

    The measured pair of components is replaced by (1, 0) or (0, 1);
    the other subsystem's components pass through untouched.
    """
    if target not in _AFTER_STATES:
        raise ValueError("unknown measurement target %r" % (target,))
    p = np.asarray(p, dtype=float)
    out = p.copy()
    part_a, part_b = _AFTER_STATES[target]
    if part_a is not None:
        out[0], out[1] = part_a
    if part_b is not None:
        out[2], out[3] = part_b
    return out


# ---------------------------------------------------------------------------
# product structure
# ---------------------------------------------------------------------------

def factorization_defect(p):
    """|p1 p4 - p2 p3| for a product-basis state; zero iff it factorizes."""
    p = np.asarray(p, dtype=float)
    return float(abs(p[0] * p[3] - p[1] * p[2]))


def product_from_marginals(p_a, p_b):
    """Joint product-basis state from per-subsystem occupancies."""
    return np.kron(np.asarray(p_a, dtype=float), np.asarray(p_b, dtype=float))


def marginals_from_product(p):
    """Per-subsystem occupancies of a product-basis joint state."""
    p = np.asarray(p, dtype=float)
    return np.array([p[0] + p[1], p[2] + p[3]]), np.array([p[0] + p[2], p[1] + p[3]])
