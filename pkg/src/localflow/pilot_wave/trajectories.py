"""Guiding-equation velocities and trajectory integration.

The velocity of particle i is ``hbar/m_i * Im(d_i Psi / Psi)`` evaluated with
all other coordinates at their actual positions.  For Gaussian branches the
derivative is closed form, so the field is exact up to rounding; Psi is
carried in log form per branch, which keeps far-tail configurations from
underflowing before the node floor is reached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import InputError, NodeError
from .packets import PilotWave, free_evolve

NODE_FLOOR = 1e-30
LOG_NODE_FLOOR = np.log(NODE_FLOOR)
DEFAULT_DT = 1e-3
PARTICLE_NAMES = "ABCDEFGH"


@dataclass(frozen=True)
class Configuration:
    positions: tuple
    masses: tuple | None = None

    def __post_init__(self):
        pos = tuple(float(x) for x in np.atleast_1d(self.positions))
        if not np.all(np.isfinite(pos)):
            raise InputError("positions must be finite")
        masses = (1.0,) * len(pos) if self.masses is None else tuple(float(m) for m in self.masses)
        if len(masses) != len(pos) or min(masses) <= 0:
            raise InputError("one positive mass per particle required")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "masses", masses)

    def as_array(self) -> np.ndarray:
        return np.array(self.positions)


def velocity_field(wave: PilotWave, X, masses=None, time: float | None = None) -> np.ndarray:
    """Guiding velocities at a batch of configurations ``X`` of shape (N, d)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    masses = np.asarray(wave.masses if masses is None else masses, dtype=float)
    L = wave.log_branches(X)
    Lmax = L.real.max(axis=1, keepdims=True)
    w = np.exp(L - Lmax)
    total = w.sum(axis=1)
    log_density = 2 * Lmax[:, 0] + np.log(np.abs(total) ** 2 + 1e-300)
    bad = log_density < LOG_NODE_FLOOR
    if np.any(bad):
        where = X[np.argmax(bad)]
        raise NodeError(
            f"|Psi|^2 below {NODE_FLOOR:g} at configuration {where.tolist()}"
            + ("" if time is None else f" (t={time:.6g})"),
            time=time,
        )
    V = np.empty_like(X)
    for i in range(X.shape[1]):
        num = np.zeros(X.shape[0], dtype=complex)
        for k, b in enumerate(wave.branches):
            num += w[:, k] * b.factors[i].dlog(X[:, i], wave.hbar)
        V[:, i] = wave.hbar / masses[i] * (num / total).imag
    return V


def guiding_velocity(wave: PilotWave, config: Configuration) -> np.ndarray:
    if len(config.positions) != wave.n_coords:
        raise InputError("configuration must have one position per wave coordinate")
    return velocity_field(wave, config.as_array()[None, :], config.masses)[0]


def transport(
    wave0: PilotWave,
    X0,
    t_end: float,
    dt: float = DEFAULT_DT,
    masses=None,
    record_every: int = 1,
    record_times: Sequence[float] | None = None,
):
    """Fixed-step RK4 transport of a batch of configurations.

    The wave at each stage time is the exact free evolution of ``wave0``.
    Returns ``(times, positions)`` with positions shaped (n_records, N, d).
    With ``record_times`` only those instants (rounded to the step grid) are
    kept.
    """
    X = np.atleast_2d(np.asarray(X0, dtype=float)).copy()
    if dt <= 0:
        raise InputError("dt must be positive")
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise InputError("t_end must be an integer multiple of dt")
    if record_times is not None:
        wanted = {int(round(t / dt)) for t in record_times}
    else:
        wanted = set(range(0, n_steps + 1, record_every)) | {n_steps}

    def field_at(t, Y):
        return velocity_field(free_evolve(wave0, t), Y, masses, time=t)

    times, snaps = [], []
    if 0 in wanted:
        field_at(0.0, X)
        times.append(0.0)
        snaps.append(X.copy())
    for s in range(n_steps):
        t = s * dt
        k1 = field_at(t, X)
        k2 = field_at(t + dt / 2, X + dt / 2 * k1)
        k3 = field_at(t + dt / 2, X + dt / 2 * k2)
        k4 = field_at(t + dt, X + dt * k3)
        X = X + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if s + 1 in wanted:
            times.append((s + 1) * dt)
            snaps.append(X.copy())
    return np.array(times), np.array(snaps)


@dataclass
class TrajectoryTable:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    branch_weights: np.ndarray
    labels: tuple
    names: tuple = field(default=())

    def rows(self) -> list[tuple]:
        """``(t, particle, x, v, branch_weight_at_config)`` rows.

        The branch weight is the local share of the dominant branch at the
        configuration.
        """
        out = []
        dominant = self.branch_weights.max(axis=1)
        for n, t in enumerate(self.times):
            for i, name in enumerate(self.names):
                out.append((float(t), name, float(self.positions[n, i]), float(self.velocities[n, i]), float(dominant[n])))
        return out


def integrate_trajectories(
    wave0: PilotWave,
    config0: Configuration,
    t_end: float,
    dt: float = DEFAULT_DT,
    record_every: int = 1,
) -> TrajectoryTable:
    """RK4 trajectory of a single configuration alongside the analytic wave."""
    if len(config0.positions) != wave0.n_coords:
        raise InputError("configuration must have one position per wave coordinate")
    if not np.allclose(config0.masses, wave0.masses):
        raise InputError("configuration masses must match the wave's packet masses")
    times, snaps = transport(wave0, config0.as_array(), t_end, dt, config0.masses, record_every)
    pos = snaps[:, 0, :]
    vel = np.empty_like(pos)
    weights = np.empty((len(times), len(wave0.branches)))
    for n, t in enumerate(times):
        w = free_evolve(wave0, t)
        vel[n] = velocity_field(w, pos[n][None, :], config0.masses, time=t)[0]
        weights[n] = w.branch_weights(pos[n][None, :])[0]
    names = tuple(PARTICLE_NAMES[i] for i in range(pos.shape[1]))
    return TrajectoryTable(times, pos, vel, weights, wave0.labels, names)


def convergence_check(wave0: PilotWave, config0: Configuration, t_end: float, dt: float = DEFAULT_DT) -> float:
    """Largest change in final positions when the step is halved."""
    _, a = transport(wave0, config0.as_array(), t_end, dt, config0.masses, record_times=[t_end])
    _, b = transport(wave0, config0.as_array(), t_end, dt / 2, config0.masses, record_times=[t_end])
    return float(np.max(np.abs(a[-1] - b[-1])))
