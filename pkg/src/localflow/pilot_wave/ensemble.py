"""Quantum-equilibrium ensembles and the equivariance check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..rng import stream
from .packets import PilotWave, free_evolve
from .trajectories import DEFAULT_DT, transport

KS_ALPHA = 1e-3


def sample_configurations(wave: PilotWave, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact draws from ``|Psi|^2`` by rejection from the branch-density mixture.

    Cauchy-Schwarz gives ``|sum_b psi_b|^2 <= B * sum_b |psi_b|^2``, so the
    mixture of branch densities scaled by the branch count is an envelope.
    """
    amps = np.array([abs(b.amplitude) ** 2 for b in wave.branches])
    probs = amps / amps.sum()
    nb = len(wave.branches)
    out = []
    have = 0
    while have < n:
        m = max(2 * (n - have) * nb, 64)
        which = rng.choice(nb, size=m, p=probs)
        X = np.empty((m, wave.n_coords))
        for k, b in enumerate(wave.branches):
            sel = which == k
            for i, f in enumerate(b.factors):
                X[sel, i] = rng.normal(f.mean_position(), f.position_std(wave.hbar), size=int(sel.sum()))
        target = wave.density(X)
        envelope = np.zeros(m)
        for k, b in enumerate(wave.branches):
            envelope += abs(b.amplitude) ** 2 * np.prod(
                [np.abs(f.value(X[:, i], wave.hbar)) ** 2 for i, f in enumerate(b.factors)], axis=0
            )
        envelope *= nb
        keep = rng.random(m) * envelope < target
        out.append(X[keep])
        have += int(keep.sum())
    return np.concatenate(out)[:n]


def marginal_cdf(wave: PilotWave, j: int, n_points: int = 20001, pad: float = 10.0):
    """Numerical CDF of the exact marginal of coordinate ``j``."""
    lo, hi = np.inf, -np.inf
    for b in wave.branches:
        f = b.factors[j]
        s = f.position_std(wave.hbar)
        lo = min(lo, f.mean_position() - pad * s)
        hi = max(hi, f.mean_position() + pad * s)
    xs = np.linspace(lo, hi, n_points)
    rho = np.clip(wave.marginal_density(j, xs), 0.0, None)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(xs))])
    cdf /= cdf[-1]
    return xs, rho, cdf


@dataclass(frozen=True)
class KSResult:
    time: float
    coordinate: int
    statistic: float
    pvalue: float
    critical: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical


@dataclass
class EquivarianceReport:
    results: list
    positions: dict
    n: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def max_statistic(self) -> float:
        return max(r.statistic for r in self.results)


def ks_against_wave(wave: PilotWave, X: np.ndarray, time: float, alpha: float = KS_ALPHA) -> list[KSResult]:
    out = []
    n = X.shape[0]
    crit = float(stats.kstwo.ppf(1 - alpha, n))
    for j in range(wave.n_coords):
        xs, _, cdf = marginal_cdf(wave, j)
        res = stats.kstest(X[:, j], lambda x: np.interp(x, xs, cdf))
        out.append(KSResult(float(time), j, float(res.statistic), float(res.pvalue), crit))
    return out


def equivariance_report(
    wave0: PilotWave,
    n: int,
    times,
    dt: float = DEFAULT_DT,
    seed: int = 0,
    alpha: float = KS_ALPHA,
) -> EquivarianceReport:
    """Transport ``n`` configurations drawn from ``|Psi(0)|^2`` and KS-test each coordinate."""
    rng = stream(seed, "equivariance")
    X0 = sample_configurations(wave0, n, rng)
    times = sorted(float(t) for t in times)
    t_rec, snaps = transport(wave0, X0, times[-1], dt, record_times=times)
    results, positions = [], {}
    for t, X in zip(t_rec, snaps):
        positions[float(t)] = X
        results.extend(ks_against_wave(free_evolve(wave0, t), X, t, alpha))
    return EquivarianceReport(results, positions, n)


def histogram_rows(wave0: PilotWave, report: EquivarianceReport, bins: int = 40) -> list[tuple]:
    """``(t, coordinate, bin_left, bin_right, empirical, theoretical)`` probability per bin."""
    rows = []
    for t, X in sorted(report.positions.items()):
        wave = free_evolve(wave0, t)
        for j in range(wave.n_coords):
            xs, _, cdf = marginal_cdf(wave, j)
            edges = np.linspace(X[:, j].min(), X[:, j].max(), bins + 1)
            counts, _ = np.histogram(X[:, j], bins=edges)
            theo = np.diff(np.interp(edges, xs, cdf))
            for k in range(bins):
                rows.append((t, j, float(edges[k]), float(edges[k + 1]), counts[k] / X.shape[0], float(theo[k])))
    return rows
