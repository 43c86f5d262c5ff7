"""Local descriptions of quantum dynamics: Heisenberg-picture descriptors,
Bell-bound audits, a setting-dependent toy ensemble and pilot-wave runs."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConventionError,
    DegeneracyError,
    InputError,
    LocalFlowError,
    NodeError,
    NumericalError,
    ResourceError,
)
from .network import Circuit, GateEvent, Descriptor, apply_gate, init_network, is_entangled, run_trace  # noqa: E402
from .pauli import PauliLetter, PauliSum, PauliTerm, commutator, expectation, multiply, to_dense_matrix  # noqa: E402
from .statevector import dual_picture_check, evolve_state  # noqa: E402
