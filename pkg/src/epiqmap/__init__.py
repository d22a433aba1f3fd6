"""Classical stochastic finite-state machines, coupled position-based
qubits, and the exact 2N-state classical image of an N-level quantum
evolution, with numerical certificates for the claimed equivalences."""

from . import coupled, density, epidemic, mapping, numkit, quantum
from .errors import (
    ComplexSpectrumError,
    DegenerateFrameError,
    FloorViolationError,
    NonFiniteStateError,
)

__version__ = "0.1.0"

__all__ = [
    "numkit",
    "epidemic",
    "coupled",
    "density",
    "quantum",
    "mapping",
    "ComplexSpectrumError",
    "DegenerateFrameError",
    "FloorViolationError",
    "NonFiniteStateError",
    "__version__",
]
