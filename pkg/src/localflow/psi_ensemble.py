"""A superdeterministic toy model with a setting-dependent outcome map.

The hidden variable ``kappa`` lives in [0, 1).  For detector settings
``(a, b)`` the unit interval is cut into four consecutive clusters with
lengths ``(1 - alpha*beta*a.b)/4`` in the order (+,+), (+,-), (-,+), (-,-);
the cluster containing ``kappa`` is the outcome.  Uniform ``kappa``
therefore reproduces singlet statistics exactly, while the cluster
boundaries move with the settings, which is the violation of statistical
independence.

For the alternating z/x experiment, ``kappa`` follows a dwell process: it is
redrawn uniformly at the epochs of a Poisson clock with rate ``1/tau``.
The z outcome is read from the first binary digit of ``kappa`` and the x
outcome from the second, so the two bases use independent partitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bell import OUTCOMES, OutcomeCounts, quantum_correlation
from .errors import InputError
from .rng import stream

BASES = ("z", "x")
_DIGIT = {"z": 1, "x": 2}


@dataclass(frozen=True)
class ClusterMap:
    """Partition of [0, 1) into four outcome clusters for one setting pair."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        if len(lengths) != 4 or min(lengths) < 0 or abs(sum(lengths) - 1.0) > 1e-12:
            raise InputError(f"cluster lengths must be 4 non-negative numbers summing to 1, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def for_settings(cls, a, b) -> "ClusterMap":
        ab = -quantum_correlation(a, b)
        raw = np.array([(1 - s * t * ab) / 4 for s, t in OUTCOMES])
        raw = np.clip(raw, 0.0, None)
        return cls(tuple(raw / raw.sum()))

    @property
    def upper_edges(self) -> np.ndarray:
        edges = np.cumsum(self.lengths)
        edges[-1] = 1.0
        return edges

    def cluster(self, kappa) -> np.ndarray:
        """Cluster index (into :data:`OUTCOMES`) for each ``kappa``; intervals are half-open."""
        kappa = np.asarray(kappa, dtype=float)
        if np.any((kappa < 0) | (kappa >= 1)):
            raise InputError("kappa must lie in [0, 1)")
        idx = np.searchsorted(self.upper_edges, kappa, side="right")
        return np.minimum(idx, 3)


def singlet_outcome(a, b, kappa: float) -> tuple[int, int]:
    """Deterministic outcome pair for settings ``a``, ``b`` and hidden value ``kappa``."""
    k = int(ClusterMap.for_settings(a, b).cluster(kappa))
    return OUTCOMES[k]


def singlet_outcomes(a, b, kappa) -> np.ndarray:
    """Vectorised :func:`singlet_outcome`; returns an (n, 2) array of +-1."""
    idx = ClusterMap.for_settings(a, b).cluster(kappa)
    return np.asarray(OUTCOMES)[idx]


def sample_outcomes(a, b, n: int, seed=0) -> OutcomeCounts:
    """Outcome counts for ``n`` uniform draws of kappa."""
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed, "psi-ensemble")
    idx = ClusterMap.for_settings(a, b).cluster(rng.random(int(n)))
    counts = np.bincount(idx, minlength=4)
    return OutcomeCounts(tuple(int(c) for c in counts))


def ensemble_correlation(a, b, n: int, seed=0) -> float:
    return sample_outcomes(a, b, n, seed).correlation


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class DependenceReport:
    """Mutual information between the setting-pair label and the cluster of kappa."""

    mutual_information: float
    exact: float
    n: int
    n_pairs: int

    @property
    def bias_scale(self) -> float:
        """Leading-order upward bias of the plug-in estimate, in bits."""
        if self.n_pairs < 2:
            return 0.0
        return 3 * (self.n_pairs - 1) / (2 * self.n * math.log(2))


def statistical_dependence_report(
    setting_pairs: Sequence,
    n: int = 100_000,
    seed=0,
    partition: Callable | None = None,
) -> DependenceReport:
    """Plug-in estimate of I(setting pair; cluster) under uniform kappa.

    ``partition(a, b)`` returns the :class:`ClusterMap` used for a pair; the
    default is the setting-dependent singlet map.  A setting-independent
    partition gives zero information.
    """
    if len(setting_pairs) < 1:
        raise InputError("need at least one setting pair")
    if n < 1:
        raise InputError("need at least one sample")
    partition = partition or ClusterMap.for_settings
    maps = [partition(a, b) for a, b in setting_pairs]
    m = len(maps)

    table = np.array([cm.lengths for cm in maps]) / m
    exact = _entropy_bits(table.sum(0)) + _entropy_bits(table.sum(1)) - _entropy_bits(table.ravel())

    rng = seed if isinstance(seed, np.random.Generator) else stream(seed, "dependence")
    labels = rng.integers(m, size=int(n))
    kappa = rng.random(int(n))
    clusters = np.empty(int(n), dtype=np.int64)
    for i, cm in enumerate(maps):
        sel = labels == i
        clusters[sel] = cm.cluster(kappa[sel])
    joint = np.bincount(labels * 4 + clusters, minlength=4 * m).reshape(m, 4) / n
    est = _entropy_bits(joint.sum(0)) + _entropy_bits(joint.sum(1)) - _entropy_bits(joint.ravel())
    return DependenceReport(max(est, 0.0), max(exact, 0.0), int(n), m)


class KappaProcess:
    """Hidden variable redrawn uniformly on [0, 1) at Poisson epochs of rate ``1/tau``."""

    def __init__(self, tau: float, seed=0, kappa: float | None = None):
        if tau <= 0:
            raise InputError("dwell time tau must be positive")
        self.tau = float(tau)
        self._rng = seed if isinstance(seed, np.random.Generator) else stream(seed, "kappa")
        self.kappa = float(self._rng.random()) if kappa is None else float(kappa)
        if not 0 <= self.kappa < 1:
            raise InputError("kappa must lie in [0, 1)")
        self.resamples = 0

    def advance(self, dt: float) -> float:
        if dt < 0:
            raise InputError("time step must be non-negative")
        if self._rng.random() < -math.expm1(-dt / self.tau):
            self.kappa = float(self._rng.random())
            self.resamples += 1
        return self.kappa


@dataclass(frozen=True)
class SingleQubitMap:
    """Threshold partition of [0, 1) for one measurement basis.

    ``p_plus`` is the Born weight of outcome +1 for the prepared state.  The
    basis picks the binary digit of kappa that is thresholded.
    """

    basis: str
    p_plus: float

    def __post_init__(self):
        if self.basis not in BASES:
            raise InputError(f"basis must be one of {BASES}, got {self.basis!r}")
        if not 0 <= self.p_plus <= 1:
            raise InputError("Born weight must lie in [0, 1]")

    @classmethod
    def for_state(cls, basis: str, bloch) -> "SingleQubitMap":
        axis = {"x": 0, "z": 2}[basis]
        return cls(basis, (1 + float(np.asarray(bloch, dtype=float)[axis])) / 2)

    @property
    def lengths(self) -> tuple[float, float]:
        return (self.p_plus, 1 - self.p_plus)

    def outcome(self, kappa: float) -> int:
        u = math.fmod(kappa * 2 ** (_DIGIT[self.basis] - 1), 1.0)
        return 1 if u < self.p_plus else -1


@dataclass(frozen=True)
class RepeatStats:
    basis: str
    repeats: int
    pairs: int

    @property
    def probability(self) -> float:
        return self.repeats / self.pairs

    @property
    def stderr(self) -> float:
        p = self.probability
        return math.sqrt(p * (1 - p) / self.pairs)


@dataclass(frozen=True)
class AlternatingResult:
    mode: str
    dt: float
    tau: float
    n: int
    outcomes: np.ndarray
    stats: dict

    @property
    def dt_over_tau(self) -> float:
        return self.dt / self.tau

    def repeat_probability(self, basis: str) -> float:
        return self.stats[basis].probability


def _bloch(basis: str, outcome: int) -> np.ndarray:
    v = np.zeros(3)
    v[{"x": 0, "z": 2}[basis]] = outcome
    return v


def alternating_run(
    dt: float,
    tau: float,
    n_measurements: int,
    seed=0,
    mode: str = "superdeterministic",
    initial_bloch=(1.0, 0.0, 0.0),
) -> AlternatingResult:
    """Alternate z, x, z, x, ... measurements spaced ``dt`` apart.

    Each outcome's Born weights come from the state left by the previous
    measurement (the first uses ``initial_bloch``).  Superdeterministic
    outcomes are read off the current kappa; quantum outcomes are fresh
    draws.  Returns, per basis, the fraction of consecutive same-basis
    measurements with equal outcomes.
    """
    if mode not in ("superdeterministic", "quantum"):
        raise InputError(f"unknown mode {mode!r}")
    if n_measurements < 4:
        raise InputError("need at least four measurements (two visits per basis)")
    if dt < 0:
        raise InputError("dt must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed, "alternating", mode)
    process = KappaProcess(tau, rng) if mode == "superdeterministic" else None
    bloch = np.asarray(initial_bloch, dtype=float)
    outcomes = np.empty(n_measurements, dtype=np.int8)
    for k in range(n_measurements):
        basis = BASES[k % 2]
        smap = SingleQubitMap.for_state(basis, bloch)
        if process is not None:
            if k:
                process.advance(dt)
            out = smap.outcome(process.kappa)
        else:
            out = 1 if rng.random() < smap.p_plus else -1
        outcomes[k] = out
        bloch = _bloch(basis, out)
    stats = {}
    for i, basis in enumerate(BASES):
        seq = outcomes[i::2]
        stats[basis] = RepeatStats(basis, int(np.sum(seq[1:] == seq[:-1])), len(seq) - 1)
    return AlternatingResult(mode, float(dt), float(tau), int(n_measurements), outcomes, stats)


def expected_repeat_probability(dt_over_tau: float) -> float:
    """Superdeterministic repeat probability: kappa survives the 2*dt gap or is redrawn."""
    survive = math.exp(-2.0 * dt_over_tau)
    return survive + (1 - survive) * 0.5
