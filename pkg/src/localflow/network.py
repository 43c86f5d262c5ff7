"""Heisenberg-picture descriptor network.

Every qubit carries a triple of Heisenberg observables ``(q_x, q_y, q_z)``.
Gates rewrite only the descriptors of the qubits they touch, using the
pre-gate components:

====  =====================================================
X     ``(q_x, -q_y, -q_z)``
Z     ``(-q_x, -q_y, q_z)``
H     ``(q_z, -q_y, q_x)``
CNOT  control ``(cx*tx, cy*tx, cz)``; target ``(tx, ty*cz, tz*cz)``
====  =====================================================

Basis convention shared with the state-vector oracle: amplitude index 0 is
the sigma_z = +1 eigenstate, and CNOT flips its target when the control
is in the sigma_z = -1 eigenstate.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ConventionError, InputError
from .pauli import BasisProductState, PauliSum, PauliTerm, expectation, qubit_key

# sigma_z eigenvalue listed at amplitude index 0, 1
BASIS_ORDER = (+1, -1)
# control eigenvalue on which CNOT applies X to its target
CNOT_TRIGGER = -1

SINGLE_QUBIT_GATES = ("I", "X", "Z", "H")
TWO_QUBIT_GATES = ("CNOT",)
GATES = SINGLE_QUBIT_GATES + TWO_QUBIT_GATES
COMPONENTS = ("x", "y", "z")


@dataclass(frozen=True)
class Descriptor:
    qubit: Hashable
    x: PauliSum
    y: PauliSum
    z: PauliSum

    @property
    def components(self) -> tuple[PauliSum, PauliSum, PauliSum]:
        return (self.x, self.y, self.z)

    def component(self, name: str) -> PauliSum:
        return getattr(self, name)

    @property
    def support(self) -> frozenset:
        return self.x.support | self.y.support | self.z.support

    def render(self) -> tuple[str, str, str]:
        return tuple(c.render() for c in self.components)


def support(d: Descriptor) -> frozenset:
    return d.support


def init_network(qubits: Iterable[Hashable]) -> dict:
    """Fresh descriptors ``(X@i, Y@i, Z@i)`` keyed by qubit id, in input order."""
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise InputError(f"duplicate qubit ids in {qubits!r}")
    return {
        q: Descriptor(
            q,
            PauliSum([PauliTerm.single("X", q)]),
            PauliSum([PauliTerm.single("Y", q)]),
            PauliSum([PauliTerm.single("Z", q)]),
        )
        for q in qubits
    }


@dataclass(frozen=True)
class GateEvent:
    t: int
    gate: str
    qubits: tuple

    def __post_init__(self):
        gate = str(self.gate).upper()
        qubits = tuple(self.qubits)
        if gate not in GATES:
            raise InputError(f"unknown gate {self.gate!r}")
        arity = 2 if gate in TWO_QUBIT_GATES else 1
        if len(qubits) != arity:
            raise InputError(f"gate {gate} takes {arity} qubit(s), got {list(qubits)!r}")
        if arity == 2 and qubits[0] == qubits[1]:
            raise InputError(f"CNOT control and target must differ, got {list(qubits)!r}")
        if isinstance(self.t, bool) or not isinstance(self.t, (int, np.integer)) or self.t < 1:
            raise InputError(f"time step must be an integer >= 1, got {self.t!r}")
        object.__setattr__(self, "gate", gate)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "t", int(self.t))


def apply_gate(descriptors: Mapping, event: GateEvent) -> dict:
    """Return a new descriptor map with ``event`` applied."""
    for q in event.qubits:
        if q not in descriptors:
            raise InputError(f"gate {event.gate} at t={event.t} references unknown qubit {q!r}")
    out = dict(descriptors)
    g = event.gate
    if g == "I":
        return out
    if g in SINGLE_QUBIT_GATES:
        (q,) = event.qubits
        d = descriptors[q]
        if g == "X":
            new = (d.x, -d.y, -d.z)
        elif g == "Z":
            new = (-d.x, -d.y, d.z)
        else:
            new = (d.z, -d.y, d.x)
        out[q] = Descriptor(q, *new)
        return out
    if g == "CNOT":
        c, t = event.qubits
        dc, dt = descriptors[c], descriptors[t]
        out[c] = Descriptor(c, dc.x * dt.x, dc.y * dt.x, dc.z)
        out[t] = Descriptor(t, dt.x, dt.y * dc.z, dt.z * dc.z)
        return out
    raise InputError(f"unknown gate {g!r}")


def _parse_phase(value) -> complex:
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        table = {"1": 1, "+1": 1, "-1": -1, "i": 1j, "+i": 1j, "-i": -1j}
        if text in table:
            return complex(table[text])
        try:
            return complex(text.replace("i", "j"))
        except ValueError:
            raise InputError(f"cannot parse phase {value!r}") from None
    return complex(value)


def _format_phase(value: complex) -> str:
    table = {1: "1", -1: "-1", 1j: "i", -1j: "-i"}
    return table.get(complex(value), repr(complex(value)))


@dataclass(frozen=True)
class Circuit:
    """Qubits, a layered gate schedule, and the fixed Heisenberg state."""

    qubits: tuple
    gates: tuple = ()
    state: BasisProductState | None = None

    def __post_init__(self):
        qubits = tuple(self.qubits)
        if len(set(qubits)) != len(qubits):
            raise InputError(f"duplicate qubit ids in {list(qubits)!r}")
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.state is None:
            object.__setattr__(self, "state", BasisProductState({q: 1 for q in qubits}))
        elif tuple(self.state.eigenvalues) != qubits:
            if set(self.state.eigenvalues) != set(qubits):
                raise InputError("state must assign an eigenvalue to exactly the circuit's qubits")
            ev = {q: self.state.eigenvalues[q] for q in qubits}
            object.__setattr__(self, "state", BasisProductState(ev, self.state.phase))
        self.validate()

    def validate(self) -> None:
        known = set(self.qubits)
        touched: dict = {}
        for ev in self.gates:
            for q in ev.qubits:
                if q not in known:
                    raise InputError(f"gate {ev.gate} at t={ev.t} references unknown qubit {q!r}")
                key = (ev.t, q)
                if key in touched:
                    raise ConventionError(f"qubit {q!r} is touched by more than one gate at t={ev.t}")
                touched[key] = ev
        steps = sorted({ev.t for ev in self.gates})
        if steps and steps != list(range(1, steps[-1] + 1)):
            raise ConventionError(f"time steps must be contiguous from 1, got {steps}")

    @property
    def depth(self) -> int:
        return max((ev.t for ev in self.gates), default=0)

    def layer(self, t: int) -> list:
        return [ev for ev in self.gates if ev.t == t]

    def truncated(self, t: int) -> "Circuit":
        return Circuit(self.qubits, [ev for ev in self.gates if ev.t <= t], self.state)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Circuit":
        try:
            qubits = list(data["qubits"])
            raw_state = dict(data.get("state", {}))
            raw_gates = list(data.get("gates", []))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed circuit: {exc}") from None
        phase = _parse_phase(raw_state.pop("phase", 1))
        if raw_state:
            state = BasisProductState(raw_state, phase)
        else:
            state = BasisProductState({q: 1 for q in qubits}, phase)
        gates = []
        for g in raw_gates:
            try:
                gates.append(GateEvent(g["t"], g["g"], tuple(g["q"])))
            except (KeyError, TypeError) as exc:
                raise InputError(f"malformed gate entry {g!r}: {exc}") from None
        return cls(tuple(qubits), tuple(gates), state)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        state = {str(q): v for q, v in self.state.eigenvalues.items()}
        state["phase"] = _format_phase(self.state.phase)
        return {
            "qubits": list(self.qubits),
            "state": state,
            "gates": [{"t": ev.t, "g": ev.gate, "q": list(ev.qubits)} for ev in self.gates],
        }


def connected_correlations(descriptors: Mapping, i, j, state: BasisProductState) -> np.ndarray:
    """3x3 matrix of ``<q_imu q_jnu> - <q_imu><q_jnu>`` against ``state``."""
    di, dj = descriptors[i], descriptors[j]
    out = np.zeros((3, 3), dtype=complex)
    for m, a in enumerate(di.components):
        ea = expectation(a, state)
        for n, b in enumerate(dj.components):
            out[m, n] = expectation(a * b, state) - ea * expectation(b, state)
    return out


def is_entangled(descriptors: Mapping, i, j, state: BasisProductState, tol: float = 1e-9) -> bool:
    if i == j:
        raise InputError("entanglement needs two distinct qubits")
    return bool(np.max(np.abs(connected_correlations(descriptors, i, j, state))) > tol)


def entanglement_witness(descriptors: Mapping, i, j, state: BasisProductState):
    """Return ``(mu, nu, correlation, product)`` for the largest connected correlation."""
    di, dj = descriptors[i], descriptors[j]
    best = None
    for m, a in enumerate(di.components):
        for n, b in enumerate(dj.components):
            corr = expectation(a * b, state)
            prod = expectation(a, state) * expectation(b, state)
            gap = abs(corr - prod)
            if best is None or gap > best[0]:
                best = (gap, COMPONENTS[m], COMPONENTS[n], corr, prod)
    return best[1:]


@dataclass
class FlowTrace:
    """Descriptor snapshots and pairwise entanglement for t = 0..depth."""

    circuit: Circuit
    steps: list = field(default_factory=list)
    entanglement: list = field(default_factory=list)
    tol: float = 1e-9

    def descriptors(self, t: int) -> dict:
        return self.steps[t]

    def support(self, t: int, qubit) -> frozenset:
        return self.steps[t][qubit].support

    def supports(self, qubit) -> list:
        return [snap[qubit].support for snap in self.steps]

    def entangled(self, t: int, i, j) -> bool:
        table = self.entanglement[t]
        return table[(i, j)] if (i, j) in table else table[(j, i)]

    def rows(self) -> list[tuple]:
        rows = []
        for t, snap in enumerate(self.steps):
            for q in sorted(snap, key=qubit_key):
                d = snap[q]
                sup = ";".join(str(s) for s in sorted(d.support, key=qubit_key))
                for name, comp in zip(COMPONENTS, d.components):
                    rows.append((t, q, name, comp.render(), sup))
        return rows

    def entanglement_rows(self) -> list[tuple]:
        rows = []
        state = self.circuit.state
        for t, table in enumerate(self.entanglement):
            for (i, j), flag in table.items():
                corr = connected_correlations(self.steps[t], i, j, state)
                rows.append((t, i, j, int(flag), float(np.max(np.abs(corr)))))
        return rows


def run_trace(circuit: Circuit, tol: float = 1e-9) -> FlowTrace:
    circuit.validate()
    snap = init_network(circuit.qubits)
    ordered = sorted(circuit.qubits, key=qubit_key)
    pairs = list(itertools.combinations(ordered, 2))
    trace = FlowTrace(circuit, tol=tol)

    def record(s):
        trace.steps.append(s)
        trace.entanglement.append({(i, j): is_entangled(s, i, j, circuit.state, tol) for i, j in pairs})

    record(snap)
    for t in range(1, circuit.depth + 1):
        for ev in circuit.layer(t):
            snap = apply_gate(snap, ev)
        record(snap)
    return trace


def random_circuit(
    qubits: Sequence[Hashable],
    depth: int,
    rng: np.random.Generator,
    cnot_prob: float = 0.4,
    state: BasisProductState | None = None,
) -> Circuit:
    """Random layered circuit over {I, X, Z, H, CNOT} with disjoint gates per layer.

    Without an explicit ``state``, the Heisenberg state is a random basis
    product state with a random quarter-turn global phase.
    """
    qubits = list(qubits)
    gates = []
    for t in range(1, depth + 1):
        free = list(rng.permutation(len(qubits)))
        while free:
            a = free.pop()
            if len(free) >= 1 and rng.random() < cnot_prob:
                b = free.pop()
                gates.append(GateEvent(t, "CNOT", (qubits[a], qubits[b])))
            else:
                g = SINGLE_QUBIT_GATES[rng.integers(len(SINGLE_QUBIT_GATES))]
                gates.append(GateEvent(t, g, (qubits[a],)))
    if state is None:
        ev = {q: int(rng.choice([1, -1])) for q in qubits}
        state = BasisProductState(ev, [1, 1j, -1, -1j][rng.integers(4)])
    return Circuit(tuple(qubits), tuple(gates), state)
