"""Dense state-vector reference for the descriptor network.

This is the Schrodinger-picture twin of :mod:`localflow.network`: it evolves
the Heisenberg state with explicit gate matrices, so expectation values can
be compared between the two pictures.  Amplitude ordering and the CNOT
trigger are taken from the network module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceError
from .network import BASIS_ORDER, CNOT_TRIGGER, COMPONENTS, Circuit, GateEvent, init_network, run_trace
from .pauli import PauliSum, expectation, qubit_key, to_dense_matrix

MAX_QUBITS = 12
DUALITY_MAX_QUBITS = 10

_SQ2 = 1.0 / np.sqrt(2.0)
_GATE_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.diag([BASIS_ORDER[0], BASIS_ORDER[1]]).astype(complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
}


def _cnot_matrix() -> np.ndarray:
    trigger = BASIS_ORDER.index(CNOT_TRIGGER)
    proj_on = np.zeros((2, 2), dtype=complex)
    proj_on[trigger, trigger] = 1
    proj_off = np.eye(2, dtype=complex) - proj_on
    return np.kron(proj_off, np.eye(2)) + np.kron(proj_on, _GATE_MATRICES["X"])


_CNOT = _cnot_matrix()


@dataclass
class StateVector:
    qubits: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        self.qubits = tuple(self.qubits)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** len(self.qubits),):
            raise InputError("amplitude vector length must be 2**n_qubits")

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * len(self.qubits))

    def fidelity(self, other) -> float:
        other = other.amplitudes if isinstance(other, StateVector) else np.asarray(other, dtype=complex)
        return float(abs(np.vdot(self.amplitudes, other)) ** 2)

    def reduced_density(self, keep) -> np.ndarray:
        """Reduced density operator on the qubits in ``keep`` (in that order)."""
        keep = list(keep)
        axes = [self.qubits.index(q) for q in keep]
        rest = [k for k in range(len(self.qubits)) if k not in axes]
        psi = np.transpose(self.tensor(), axes + rest).reshape(2 ** len(axes), -1)
        return psi @ psi.conj().T


def basis_state(circuit: Circuit) -> StateVector:
    vec = np.array([1.0 + 0j])
    for q in circuit.qubits:
        local = np.zeros(2, dtype=complex)
        local[BASIS_ORDER.index(circuit.state.eigenvalues[q])] = 1
        vec = np.kron(vec, local)
    return StateVector(circuit.qubits, circuit.state.phase * vec)


def apply_gate_dense(state: StateVector, event: GateEvent) -> StateVector:
    n = len(state.qubits)
    axes = [state.qubits.index(q) for q in event.qubits]
    mat = _CNOT if event.gate == "CNOT" else _GATE_MATRICES[event.gate]
    k = len(axes)
    psi = np.moveaxis(state.tensor(), axes, list(range(k)))
    psi = (mat @ psi.reshape(2**k, -1)).reshape((2,) * n)
    psi = np.moveaxis(psi, list(range(k)), axes)
    return StateVector(state.qubits, psi.reshape(-1))


def layer_unitary(circuit: Circuit, t: int) -> np.ndarray:
    """Dense unitary of layer ``t`` (columns are images of basis states)."""
    n = len(circuit.qubits)
    if n > MAX_QUBITS:
        raise ResourceError(f"{n} qubits exceeds dense limit of {MAX_QUBITS}")
    dim = 2**n
    cols = []
    for k in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[k] = 1
        s = StateVector(circuit.qubits, e)
        for ev in circuit.layer(t):
            s = apply_gate_dense(s, ev)
        cols.append(s.amplitudes)
    return np.array(cols).T


def evolve_state(circuit: Circuit, t: int | None = None) -> StateVector:
    """State after layers 1..t (all layers by default)."""
    if len(circuit.qubits) > MAX_QUBITS:
        raise ResourceError(f"{len(circuit.qubits)} qubits exceeds dense limit of {MAX_QUBITS}")
    t = circuit.depth if t is None else t
    s = basis_state(circuit)
    for step in range(1, t + 1):
        for ev in circuit.layer(step):
            s = apply_gate_dense(s, ev)
    return s


def evolve_states(circuit: Circuit) -> list[StateVector]:
    """States for t = 0..depth."""
    s = basis_state(circuit)
    out = [s]
    for step in range(1, circuit.depth + 1):
        for ev in circuit.layer(step):
            s = apply_gate_dense(s, ev)
        out.append(s)
    return out


def state_expectation(state: StateVector, obs) -> complex:
    mat = to_dense_matrix(PauliSum.coerce(obs), state.qubits)
    return complex(np.vdot(state.amplitudes, mat @ state.amplitudes))


def expectation_at(circuit: Circuit, t: int, obs) -> complex:
    if not 0 <= t <= circuit.depth:
        raise InputError(f"step {t} outside schedule 0..{circuit.depth}")
    return state_expectation(evolve_state(circuit, t), obs)


@dataclass
class DualityReport:
    max_abs_diff: float
    location: tuple | None
    rows: list
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_abs_diff < self.tol


def dual_picture_check(circuit: Circuit, tol: float = 1e-10) -> DualityReport:
    """Compare ``<psi0|q(t)|psi0>`` with ``<psi(t)|q(0)|psi(t)>`` for all t, qubits, components."""
    if len(circuit.qubits) > DUALITY_MAX_QUBITS:
        raise ResourceError(f"duality check limited to {DUALITY_MAX_QUBITS} qubits")
    trace = run_trace(circuit)
    states = evolve_states(circuit)
    initial = init_network(circuit.qubits)
    mats = {
        (q, c): to_dense_matrix(initial[q].component(c), circuit.qubits)
        for q in circuit.qubits
        for c in COMPONENTS
    }
    rows = []
    worst, where = 0.0, None
    for t, snap in enumerate(trace.steps):
        amp = states[t].amplitudes
        for q in sorted(circuit.qubits, key=qubit_key):
            for c in COMPONENTS:
                h = expectation(snap[q].component(c), circuit.state)
                s = complex(np.vdot(amp, mats[(q, c)] @ amp))
                diff = abs(h - s)
                rows.append((t, q, c, h, s, diff))
                if where is None or diff > worst:
                    worst, where = diff, (t, q, c)
    return DualityReport(float(worst), where, rows, tol)


def heisenberg_dense(circuit: Circuit, t: int, obs) -> np.ndarray:
    """Dense ``V_t^dag obs V_t`` with ``V_t`` the product of layers 1..t."""
    mat = to_dense_matrix(PauliSum.coerce(obs), circuit.qubits)
    for step in range(t, 0, -1):
        u = layer_unitary(circuit, step)
        mat = u.conj().T @ mat @ u
    return mat


def pair_correlated(state: StateVector, i, j, tol: float = 1e-9) -> bool:
    """True when the two-qubit reduced state differs from the product of its marginals."""
    rho_ij = state.reduced_density([i, j])
    rho_i = state.reduced_density([i])
    rho_j = state.reduced_density([j])
    return bool(np.max(np.abs(rho_ij - np.kron(rho_i, rho_j))) > tol)


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)
