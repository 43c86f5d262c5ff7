import numpy as np

from localflow.network import Circuit, GateEvent, random_circuit, run_trace
from localflow.pauli import BasisProductState, PauliSum, PauliTerm
from localflow.statevector import (
    StateVector,
    basis_state,
    dual_picture_check,
    evolve_state,
    expectation_at,
    pair_correlated,
    purity,
)

SINGLET_AB = np.array([0, 1, -1, 0]) / np.sqrt(2)


def _singlet_circuit():
    # H, CNOT and X give the triplet from |+1,+1>; Z on A turns it into the singlet
    gates = ("H", "CNOT", "X", "Z")
    return Circuit(
        ("A", "B"),
        tuple(GateEvent(t, g, ("A", "B") if g == "CNOT" else ("A",)) for t, g in enumerate(gates, 1)),
    )


def test_fig2_singlet_at_t3(fig2):
    psi = evolve_state(fig2, 3)
    # qubit C is untouched at t=3: project it out in its +1 branch
    ab = psi.tensor()[:, :, 0].reshape(4)
    assert abs(np.linalg.norm(ab) - 1) < 1e-12
    assert StateVector(("A", "B"), ab).fidelity(SINGLET_AB) >= 1 - 1e-10


def test_empty_and_bitflip():
    c = Circuit(("A", "B"), (), BasisProductState({"A": 1, "B": -1}))
    assert np.array_equal(evolve_state(c).amplitudes, basis_state(c).amplitudes)
    flip = Circuit(("A",), (GateEvent(1, "X", ("A",)),))
    assert np.allclose(evolve_state(flip).amplitudes, [0, 1])


def test_singlet_expectations():
    c = _singlet_circuit()
    assert evolve_state(c).fidelity(SINGLET_AB) > 1 - 1e-12
    zz = PauliTerm.from_map({"A": "Z", "B": "Z"})
    assert np.isclose(expectation_at(c, 4, zz), -1)
    assert np.isclose(expectation_at(c, 4, PauliTerm.single("Z", "A")), 0)
    assert np.isclose(expectation_at(c, 4, PauliSum([PauliTerm.identity()])), 1)


def test_duality(fig2):
    assert dual_picture_check(fig2).max_abs_diff < 1e-10
    assert dual_picture_check(Circuit(("A", "B"), ())).max_abs_diff == 0
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(200):
        c = random_circuit(list("ABCD"), 10, rng)
        worst = max(worst, dual_picture_check(c).max_abs_diff)
    assert worst < 1e-10


def test_entanglement_agrees_with_reduced_density(fig2):
    rng = np.random.default_rng(17)
    circuits = [fig2] + [random_circuit(list("ABCD"), 6, rng) for _ in range(60)]
    for c in circuits:
        trace = run_trace(c)
        for t in range(c.depth + 1):
            psi = evolve_state(c, t)
            for i in c.qubits:
                for j in c.qubits:
                    if i < j:
                        assert trace.entangled(t, i, j) == pair_correlated(psi, i, j), (t, i, j)


def test_purity_two_qubits():
    psi = evolve_state(_singlet_circuit())
    assert np.isclose(purity(psi.reduced_density(["A"])), 0.5)
