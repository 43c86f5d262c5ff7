"""Singlet correlations, finite local hidden-variable models and the Bell bound.

Hidden-variable models here are finite: ``n_lambda`` hidden states with
weights ``rho`` that are stored apart from the setting indices, so
statistical independence holds by construction.  The slack of a triple of
settings is ``1 + P(b, c) - |P(a, b) - P(a, c)|``; negative slack is a
violation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError
from .rng import stream

UNIT_TOL = 1e-12
VIOLATION_THRESHOLD = 1e-9
MAX_EXHAUSTIVE = 2**20
OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_EXACT_COS = {0: 1.0, 60: 0.5, 90: 0.0, 120: -0.5, 180: -1.0, 240: -0.5, 270: 0.0, 300: 0.5}


def cosd(theta_deg: float) -> float:
    """Cosine of an angle in degrees, exact where the value is rational."""
    r = math.fmod(float(theta_deg), 360.0)
    if r < 0:
        r += 360.0
    if r.is_integer() and int(r) in _EXACT_COS:
        return _EXACT_COS[int(r)]
    return math.cos(math.radians(r))


def sind(theta_deg: float) -> float:
    return cosd(90.0 - theta_deg)


def setting_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise InputError(f"setting must have 3 components, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise InputError(f"setting must be a unit vector, |v| = {np.linalg.norm(v)!r}")
    return v


def coplanar_setting(theta_deg: float) -> np.ndarray:
    """Unit vector in the x-y plane at ``theta_deg`` from the x axis."""
    return np.array([cosd(theta_deg), sind(theta_deg), 0.0])


def quantum_correlation(a, b) -> float:
    """Singlet spin correlation ``-a.b``."""
    a, b = setting_vector(a), setting_vector(b)
    return float(np.clip(-np.dot(a, b), -1.0, 1.0))


def coplanar_correlation(theta_a: float, theta_b: float) -> float:
    """Singlet correlation for coplanar settings, ``-cos(theta_b - theta_a)``."""
    return -cosd(theta_b - theta_a)


def singlet_probabilities(a, b) -> np.ndarray:
    """Joint probabilities ``(1 - alpha*beta*a.b)/4`` in the order of :data:`OUTCOMES`."""
    ab = -quantum_correlation(a, b)
    p = np.array([(1 - s * t * ab) / 4 for s, t in OUTCOMES])
    p = np.clip(p, 0.0, None)
    return p / p.sum()


@dataclass(frozen=True)
class OutcomeCounts:
    """Counts of joint outcomes ``(alpha, beta)`` in the order of :data:`OUTCOMES`."""

    counts: tuple

    @property
    def n(self) -> int:
        return int(sum(self.counts))

    def __getitem__(self, outcome) -> int:
        return self.counts[OUTCOMES.index(tuple(outcome))]

    def as_dict(self) -> dict:
        return dict(zip(OUTCOMES, self.counts))

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    @property
    def correlation(self) -> float:
        signs = np.array([s * t for s, t in OUTCOMES])
        return float(np.dot(signs, self.counts) / self.n)

    @property
    def equal_outcomes(self) -> int:
        return self[(1, 1)] + self[(-1, -1)]


def _generator(seed, *keys) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(seed, *keys)


def sample_singlet(a, b, n: int, seed=0) -> OutcomeCounts:
    """Draw ``n`` i.i.d. singlet outcome pairs for settings ``a``, ``b``."""
    if n < 1:
        raise InputError("need at least one sample")
    rng = _generator(seed, "singlet")
    counts = rng.multinomial(int(n), singlet_probabilities(a, b))
    return OutcomeCounts(tuple(int(c) for c in counts))


def correlation_sigma(rho: float, n: int) -> float:
    """Standard error of a +-1 product mean with expectation ``rho``."""
    return math.sqrt(max(1.0 - rho * rho, 0.0) / n)


@dataclass(frozen=True)
class DeterministicStrategy:
    """Response tables ``A[setting, lambda]`` and ``B[setting, lambda]`` with values +-1."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.int8)
        B = np.asarray(self.B, dtype=np.int8)
        if A.ndim != 2 or A.shape != B.shape:
            raise InputError("A and B must be 2-d tables of equal shape (settings, lambdas)")
        if not (np.isin(A, (-1, 1)).all() and np.isin(B, (-1, 1)).all()):
            raise InputError("responses must be +1 or -1")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n_settings(self) -> int:
        return self.A.shape[0]

    @property
    def n_lambda(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class HiddenVariableModel:
    weights: np.ndarray
    strategy: DeterministicStrategy

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.strategy.n_lambda,):
            raise InputError("one weight per hidden state required")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise InputError("weights must be non-negative and sum to 1")
        object.__setattr__(self, "weights", w)

    @property
    def n_settings(self) -> int:
        return self.strategy.n_settings

    def correlation_matrix(self) -> np.ndarray:
        """``P[a, b] = sum_lambda rho(lambda) A(a, lambda) B(b, lambda)``."""
        A = self.strategy.A.astype(float)
        B = self.strategy.B.astype(float)
        return (A * self.weights) @ B.T

    def permuted(self, perm) -> "HiddenVariableModel":
        perm = np.asarray(perm)
        s = DeterministicStrategy(self.strategy.A[:, perm], self.strategy.B[:, perm])
        return HiddenVariableModel(self.weights[perm], s)


def hv_correlation(model: HiddenVariableModel, a: int, b: int) -> float:
    A, B = model.strategy.A, model.strategy.B
    return float(np.sum(model.weights * A[a] * B[b]))


def bell_slack(P: Callable, a, b, c) -> float:
    """``1 + P(b, c) - |P(a, b) - P(a, c)|``; the inequality holds iff this is >= 0."""
    return 1.0 + P(b, c) - abs(P(a, b) - P(a, c))


def slack_tensor(P: np.ndarray) -> np.ndarray:
    """Slack for every ordered setting triple; ``P`` may carry leading batch axes."""
    P = np.asarray(P, dtype=float)
    pab = P[..., :, :, None]
    pac = P[..., :, None, :]
    pbc = P[..., None, :, :]
    return 1.0 + pbc - np.abs(pab - pac)


@dataclass(frozen=True)
class AuditReport:
    min_slack: float
    triple: tuple
    n_models: int
    exhaustive: bool
    threshold: float = VIOLATION_THRESHOLD

    @property
    def violated(self) -> bool:
        return self.min_slack < -self.threshold


def audit_correlations(P: np.ndarray) -> AuditReport:
    """Minimum slack of a single correlation matrix over all setting triples."""
    S = slack_tensor(P)
    idx = np.unravel_index(int(np.argmin(S)), S.shape)
    return AuditReport(float(S[idx]), tuple(int(i) for i in idx), 1, True)


def strategy_count(n_settings: int, n_lambda: int, anticorrelated: bool = True) -> int:
    cells = n_settings * n_lambda
    return 2 ** (cells if anticorrelated else 2 * cells)


def enumerate_strategies(
    n_settings: int, n_lambda: int, start: int = 0, stop: int | None = None, anticorrelated: bool = True
):
    """Response tables for strategies ``start..stop`` as arrays of shape (N, settings, lambdas).

    Strategy number k encodes A in its low bits and, when B is free, B in
    its high bits.  Anticorrelated strategies have ``B = -A``.
    """
    cells = n_settings * n_lambda
    total = strategy_count(n_settings, n_lambda, anticorrelated)
    stop = total if stop is None else min(stop, total)
    ks = np.arange(start, stop, dtype=np.int64)
    width = cells if anticorrelated else 2 * cells
    bits = ((ks[:, None] >> np.arange(width, dtype=np.int64)) & 1).astype(np.int8)
    signs = 1 - 2 * bits
    A = signs[:, :cells].reshape(-1, n_settings, n_lambda)
    B = -A if anticorrelated else signs[:, cells:].reshape(-1, n_settings, n_lambda)
    return A, B


def _batch_min(A, B, W):
    P = np.einsum("nal,nl,nbl->nab", A.astype(float), W, B.astype(float))
    S = slack_tensor(P).reshape(len(P), -1)
    flat = int(np.argmin(S))
    n, k = divmod(flat, S.shape[1])
    return float(S[n, k]), n, k


def random_model(
    n_settings: int, n_lambda: int, rng: np.random.Generator, anticorrelated: bool = True
) -> HiddenVariableModel:
    A = rng.choice(np.array([-1, 1], dtype=np.int8), size=(n_settings, n_lambda))
    B = -A if anticorrelated else rng.choice(np.array([-1, 1], dtype=np.int8), size=(n_settings, n_lambda))
    w = rng.dirichlet(np.ones(n_lambda))
    return HiddenVariableModel(w / w.sum(), DeterministicStrategy(A, B))


def audit_hv_bound(
    n_settings: int,
    n_lambda: int,
    trials: int = 10_000,
    seed: int = 0,
    chunk: int = 4096,
    max_exhaustive: int = MAX_EXHAUSTIVE,
    anticorrelated: bool = True,
) -> AuditReport:
    """Minimum Bell slack over local, statistically independent models.

    The inequality presumes the model reproduces ``P(a, a) = -1``, which for
    +-1 responses forces ``B(x, l) = -A(x, l)``; that is the default.  With
    ``anticorrelated=False`` both tables are free and the bound fails (a
    single l already reaches slack -2).

    Small strategy spaces are enumerated exhaustively with uniform weights;
    larger ones are sampled: ``trials`` models, uniform +-1 tables and
    weights uniform on the simplex, in chunks of ``chunk`` models where
    chunk ``k`` draws from stream ``(seed, "hv-audit", k)``.
    """
    if n_settings < 3:
        raise InputError("need at least three settings")
    if n_lambda < 1:
        raise InputError("need at least one hidden state")
    s = n_settings
    triple_shape = (s, s, s)
    best = (math.inf, (0, 0, 0))
    total = strategy_count(n_settings, n_lambda, anticorrelated)
    if total <= max_exhaustive:
        W_row = np.full(n_lambda, 1.0 / n_lambda)
        for start in range(0, total, chunk):
            A, B = enumerate_strategies(n_settings, n_lambda, start, start + chunk, anticorrelated)
            W = np.broadcast_to(W_row, (len(A), n_lambda))
            val, _, k = _batch_min(A, B, W)
            if val < best[0]:
                best = (val, np.unravel_index(k, triple_shape))
        return AuditReport(best[0], tuple(int(i) for i in best[1]), total, True)

    done = 0
    worker = 0
    while done < trials:
        m = min(chunk, trials - done)
        rng = stream(seed, "hv-audit", worker)
        A = rng.choice(np.array([-1, 1], dtype=np.int8), size=(m, s, n_lambda))
        if anticorrelated:
            B = -A
        else:
            B = rng.choice(np.array([-1, 1], dtype=np.int8), size=(m, s, n_lambda))
        W = rng.dirichlet(np.ones(n_lambda), size=m)
        val, _, k = _batch_min(A, B, W)
        if val < best[0]:
            best = (val, np.unravel_index(k, triple_shape))
        done += m
        worker += 1
    return AuditReport(best[0], tuple(int(i) for i in best[1]), trials, False)


def sign_model(angles_deg: Sequence[float], n_lambda: int = 720) -> HiddenVariableModel:
    """Bell's local model on coplanar settings with the hidden angle on a finite grid.

    ``A(a, l) = sign cos(theta_a - l)`` and ``B(b, l) = -sign cos(theta_b - l)``
    with ``l`` on a uniformly weighted, half-step-offset grid of the circle.
    """
    lam = (np.arange(n_lambda) + 0.5) * 360.0 / n_lambda
    theta = np.asarray(angles_deg, dtype=float)
    c = np.cos(np.radians(theta[:, None] - lam[None, :]))
    A = np.where(c >= 0, 1, -1)
    B = -A
    return HiddenVariableModel(np.full(n_lambda, 1.0 / n_lambda), DeterministicStrategy(A, B))


def coplanar_grid(resolution: int, max_angle: float = 180.0) -> list[tuple[float, float]]:
    """``(theta_b, theta_c)`` pairs with ``a`` fixed at 0 and both angles on a uniform grid."""
    if resolution < 2:
        raise InputError("grid resolution must be at least 2")
    step = max_angle / (resolution - 1)
    angles = [i * step for i in range(resolution)]
    return list(itertools.product(angles, angles))
