"""File-driven pilot-wave runs.

A scenario is JSON with either a ``singlet`` block (spin-up and spin-down
packets per coordinate) or an explicit ``branches`` list, an initial
configuration, and timing.  An optional ``pointer`` block attaches the
measurer coordinate at ``pointer.time``; the run then continues in three
coordinates.  An optional ``ensemble`` block requests the equivariance
check on the initial wave.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import InputError
from .ensemble import EquivarianceReport, equivariance_report
from .packets import BranchWave, GaussianPacket, PilotWave, free_evolve, measure_meiosis, prepare_singlet
from .trajectories import DEFAULT_DT, Configuration, TrajectoryTable, integrate_trajectories, velocity_field

_PACKET_KEYS = {"center", "momentum", "width", "mass", "phase"}


def packet_from_dict(d: Mapping) -> GaussianPacket:
    extra = set(d) - _PACKET_KEYS
    if extra or "center" not in d:
        raise InputError(f"packet needs 'center' and only keys {sorted(_PACKET_KEYS)}; got {sorted(d)}")
    return GaussianPacket(**{k: float(v) for k, v in d.items()})


def _amplitude(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


@dataclass
class Scenario:
    wave: PilotWave
    initial: tuple
    t_end: float
    dt: float = DEFAULT_DT
    record_every: int = 100
    pointer: tuple | None = None
    pointer_time: float = 0.0
    pointer_initial: float | None = None
    ensemble_n: int = 0
    ensemble_times: tuple = ()
    bins: int = 40

    @classmethod
    def from_dict(cls, data: Mapping) -> "Scenario":
        try:
            hbar = float(data.get("hbar", 1.0))
            if "singlet" in data:
                s = data["singlet"]
                up = [packet_from_dict(p) for p in s["up"]]
                down = [packet_from_dict(p) for p in s["down"]]
                wave = prepare_singlet(up, down, hbar)
            elif "branches" in data:
                branches = [
                    BranchWave(_amplitude(b.get("amplitude", 1.0)), tuple(packet_from_dict(f) for f in b["factors"]), b.get("label", ""))
                    for b in data["branches"]
                ]
                wave = PilotWave(tuple(branches), hbar).normalized()
            else:
                raise InputError("scenario needs a 'singlet' or 'branches' block")
            initial = tuple(float(x) for x in data["initial"])
            pointer = pointer_time = pointer_initial = None
            if "pointer" in data:
                p = data["pointer"]
                pointer = (packet_from_dict(p["up"]), packet_from_dict(p["down"]))
                pointer_time = float(p.get("time", 0.0))
                pointer_initial = float(p["initial"])
            ens = data.get("ensemble", {})
            return cls(
                wave=wave,
                initial=initial,
                t_end=float(data["t_end"]),
                dt=float(data.get("dt", DEFAULT_DT)),
                record_every=int(data.get("record_every", 100)),
                pointer=pointer,
                pointer_time=pointer_time or 0.0,
                pointer_initial=pointer_initial,
                ensemble_n=int(ens.get("n", 0)),
                ensemble_times=tuple(float(t) for t in ens.get("times", ())),
                bins=int(data.get("bins", 40)),
            )
        except KeyError as exc:
            raise InputError(f"scenario is missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed scenario: {exc}") from None


@dataclass
class ScenarioResult:
    trajectories: list = field(default_factory=list)
    meiosis: dict | None = None
    equivariance: EquivarianceReport | None = None
    initial_wave: PilotWave | None = None

    def trajectory_rows(self) -> list[tuple]:
        rows = []
        for table, offset in self.trajectories:
            for t, name, x, v, w in table.rows():
                rows.append((round(t + offset, 12), name, x, v, w))
        seen = set()
        out = []
        for r in rows:
            key = (r[0], r[1])
            if key not in seen:
                seen.add(key)
                out.append(r)
        return out

    def branch_rows(self) -> list[tuple]:
        rows = []
        seen = set()
        for table, offset in self.trajectories:
            for n, t in enumerate(table.times):
                tt = round(float(t) + offset, 12)
                for k, label in enumerate(table.labels):
                    key = (tt, k)
                    if key in seen:
                        continue
                    seen.add(key)
                    rows.append((tt, k, label, float(table.branch_weights[n, k])))
        return rows


def _segment(wave: PilotWave, config: Configuration, duration: float, dt: float, every: int) -> TrajectoryTable:
    return integrate_trajectories(wave, config, duration, dt, every)


def run_scenario(sc: Scenario, n_ensemble: int | None = None, seed: int = 0) -> ScenarioResult:
    res = ScenarioResult(initial_wave=sc.wave)
    masses = sc.wave.masses
    if sc.pointer is None:
        table = _segment(sc.wave, Configuration(sc.initial, masses), sc.t_end, sc.dt, sc.record_every)
        res.trajectories.append((table, 0.0))
    else:
        if not 0 <= sc.pointer_time <= sc.t_end:
            raise InputError("pointer time must lie within [0, t_end]")
        first = _segment(sc.wave, Configuration(sc.initial, masses), sc.pointer_time, sc.dt, sc.record_every) if sc.pointer_time > 0 else None
        if first is not None:
            res.trajectories.append((first, 0.0))
            X = tuple(first.positions[-1])
        else:
            X = sc.initial
        wave_t = free_evolve(sc.wave, sc.pointer_time)
        meiosis = measure_meiosis(wave_t, sc.pointer)
        config = Configuration(X + (sc.pointer_initial,), meiosis.wave.masses)
        populated = int(np.argmax(meiosis.wave.branch_weights(np.array([config.positions]))[0]))
        single = PilotWave((meiosis.wave.branches[populated],), meiosis.wave.hbar)
        second = _segment(meiosis.wave, config, sc.t_end - sc.pointer_time, sc.dt, sc.record_every)
        res.trajectories.append((second, sc.pointer_time))
        worst = 0.0
        for n, t in enumerate(second.times):
            Y = second.positions[n][None, :]
            v_full = velocity_field(free_evolve(meiosis.wave, t), Y, config.masses)[0, -1]
            v_single = velocity_field(free_evolve(single, t), Y, config.masses)[0, -1]
            worst = max(worst, abs(v_full - v_single) / max(abs(v_single), 1.0))
        res.meiosis = {
            "time": sc.pointer_time,
            "pointer_overlap": meiosis.pointer_overlap,
            "populated_branch": meiosis.wave.labels[populated],
            "pointer_final": float(second.positions[-1, -1]),
            "max_rel_velocity_diff": float(worst),
        }
    n = sc.ensemble_n if n_ensemble is None else n_ensemble
    if n and sc.ensemble_times:
        res.equivariance = equivariance_report(sc.wave, n, sc.ensemble_times, sc.dt, seed)
    return res
