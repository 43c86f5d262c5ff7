"""Pilot-wave trajectories for a separating singlet, then a pointer that reads particle B.

The configuration sits in one branch; the other branch keeps evolving but
stops steering anything once the supports separate.
"""

import numpy as np

from localflow.pilot_wave import (
    Configuration,
    GaussianPacket,
    free_evolve,
    integrate_trajectories,
    measure_meiosis,
    prepare_singlet,
    velocity_field,
)

up = [GaussianPacket(-8.5, 3.0), GaussianPacket(11.5, 3.0)]
down = [GaussianPacket(-11.5, -3.0), GaussianPacket(8.5, -3.0)]
wave = prepare_singlet(up, down)

table = integrate_trajectories(wave, Configuration((-8.2, 8.7)), 1.0, 1e-3, record_every=100)
print(f"{'t':>5} {'X_A':>8} {'X_B':>8} {'phi_up(A) centre':>17} {'weight of ↑↓':>13}")
for n, t in enumerate(table.times):
    centre = up[0].evolved(t).mean_position()
    print(f"{t:5.2f} {table.positions[n, 0]:8.3f} {table.positions[n, 1]:8.3f} {centre:17.3f} {table.branch_weights[n, 0]:13.10f}")

wave_1 = free_evolve(wave, 1.0)
res = measure_meiosis(wave_1, (GaussianPacket(25.0), GaussianPacket(35.0)))
print(f"\npointer branches {res.wave.labels}, overlap {abs(res.pointer_overlap):.2e}")

X = np.array([[*table.positions[-1], 35.2]])
v_full = velocity_field(res.wave, X)[0]
v_populated = velocity_field(res.wave.without_branch(1), X)[0]
print("velocity with both branches:  ", np.round(v_full, 10) + 0.0)
print("velocity with populated only: ", np.round(v_populated, 10) + 0.0)
