"""Watch entanglement spread through a three-qubit network, one gate at a time.

Each qubit carries a triple of Heisenberg-picture observables.  A gate only
rewrites the descriptors of the qubits it touches, yet after a CNOT the
target's descriptor contains letters of the control: that is where the
record of the interaction lives.
"""

from importlib import resources
import json

from localflow.network import Circuit, run_trace
from localflow.statevector import dual_picture_check, evolve_state

circuit = Circuit.from_dict(json.loads((resources.files("localflow") / "data" / "fig2.json").read_text()))
trace = run_trace(circuit)

for t in range(circuit.depth + 1):
    print(f"--- t = {t}")
    for q in circuit.qubits:
        x, y, z = trace.descriptors(t)[q].render()
        print(f"  q_{q}: x = {x:<22} y = {y:<24} z = {z}")
    pairs = [f"{i}{j}" for i, j in (("A", "B"), ("A", "C"), ("B", "C")) if trace.entangled(t, i, j)]
    print("  entangled pairs:", ", ".join(pairs) or "none")

print("\nsupport of q_C over time:", [sorted(s) for s in trace.supports("C")])

# the Schrodinger picture tells the same story
report = dual_picture_check(circuit)
print(f"max |<q(t)>_H - <q>_S(t)| = {report.max_abs_diff:.2e}")
psi = evolve_state(circuit, 3)
print("amplitudes at t = 3:", {i: round(float(a.real), 4) for i, a in enumerate(psi.amplitudes) if abs(a) > 1e-12})
