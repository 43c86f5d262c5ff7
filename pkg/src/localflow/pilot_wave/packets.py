"""Gaussian branch waves with closed-form free evolution.

A packet of amplitude width ``w`` born at ``center`` with ``momentum`` p is

    phi(x, 0) = (pi w^2)^(-1/4) exp(-(x - x0)^2 / (2 w^2) + i p (x - x0)/hbar + i phase)

so ``|phi|^2`` has standard deviation ``w / sqrt(2)``.  After free flight
for a time ``age`` the amplitude width is ``w * sqrt(1 + (hbar t / (m w^2))^2)``
and the centre has moved by ``p t / m``.  Every packet is stored with its
age; evaluating it uses the exact free-particle solution.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..errors import DegeneracyError, InputError

HBAR = 1.0
DEGENERACY_NORM = 1e-12


@dataclass(frozen=True)
class GaussianPacket:
    center: float
    momentum: float = 0.0
    width: float = 1.0
    mass: float = 1.0
    phase: float = 0.0
    age: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise InputError(f"packet width must be positive, got {self.width!r}")
        if not self.mass > 0:
            raise InputError(f"packet mass must be positive, got {self.mass!r}")

    def evolved(self, t: float) -> "GaussianPacket":
        return replace(self, age=self.age + t)

    def gamma(self, hbar: float = HBAR) -> complex:
        return 1 + 1j * hbar * self.age / (self.mass * self.width**2)

    def mean_position(self) -> float:
        return self.center + self.momentum * self.age / self.mass

    def spread(self, hbar: float = HBAR) -> float:
        """Amplitude width at the packet's current age."""
        return self.width * abs(self.gamma(hbar))

    def position_std(self, hbar: float = HBAR) -> float:
        return self.spread(hbar) / math.sqrt(2.0)

    def quadratic(self, hbar: float = HBAR) -> tuple[complex, complex, complex]:
        """Coefficients ``(A, B, C)`` with ``log phi(x) = -A x^2 + B x + C``."""
        a = 1.0 / (2 * self.width**2)
        g = self.gamma(hbar)
        mu = self.mean_position()
        k = self.momentum / hbar
        omega = self.momentum**2 / (2 * self.mass * hbar)
        A = a / g
        B = 2 * a * mu / g + 1j * k
        C = (
            -0.25 * math.log(math.pi * self.width**2)
            - 0.5 * cmath.log(g)
            - a * mu**2 / g
            - 1j * k * self.center
            - 1j * omega * self.age
            + 1j * self.phase
        )
        return A, B, C

    def log_value(self, x, hbar: float = HBAR):
        a = 1.0 / (2 * self.width**2)
        g = self.gamma(hbar)
        mu = self.mean_position()
        k = self.momentum / hbar
        omega = self.momentum**2 / (2 * self.mass * hbar)
        x = np.asarray(x, dtype=float)
        return (
            -0.25 * math.log(math.pi * self.width**2)
            - 0.5 * cmath.log(g)
            - a * (x - mu) ** 2 / g
            + 1j * k * (x - self.center)
            - 1j * omega * self.age
            + 1j * self.phase
        )

    def value(self, x, hbar: float = HBAR):
        return np.exp(self.log_value(x, hbar))

    def dlog(self, x, hbar: float = HBAR):
        """``d/dx log phi`` at ``x``."""
        a = 1.0 / (2 * self.width**2)
        x = np.asarray(x, dtype=float)
        return -2 * a * (x - self.mean_position()) / self.gamma(hbar) + 1j * self.momentum / hbar


def gaussian_overlap(f: GaussianPacket, g: GaussianPacket, hbar: float = HBAR) -> complex:
    """``<f|g>`` in closed form."""
    Af, Bf, Cf = f.quadratic(hbar)
    Ag, Bg, Cg = g.quadratic(hbar)
    A = Af.conjugate() + Ag
    B = Bf.conjugate() + Bg
    C = Cf.conjugate() + Cg
    return cmath.sqrt(math.pi / A) * cmath.exp(B * B / (4 * A) + C)


@dataclass(frozen=True)
class BranchWave:
    amplitude: complex
    factors: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True)
class PilotWave:
    """Sum of product-Gaussian branches over a fixed number of coordinates."""

    branches: tuple
    hbar: float = HBAR

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise InputError("pilot wave needs at least one branch")
        d = len(branches[0].factors)
        if any(len(b.factors) != d for b in branches):
            raise InputError("every branch needs one factor per coordinate")
        object.__setattr__(self, "branches", branches)

    @property
    def n_coords(self) -> int:
        return len(self.branches[0].factors)

    @property
    def labels(self) -> tuple:
        return tuple(b.label for b in self.branches)

    @property
    def masses(self) -> tuple:
        return tuple(f.mass for f in self.branches[0].factors)

    def log_branches(self, X) -> np.ndarray:
        """Complex log of each branch at configurations ``X`` of shape (N, d) -> (N, n_branches)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty((X.shape[0], len(self.branches)), dtype=complex)
        for k, b in enumerate(self.branches):
            acc = np.full(X.shape[0], cmath.log(b.amplitude) if b.amplitude != 0 else -np.inf, dtype=complex)
            for i, f in enumerate(b.factors):
                acc = acc + f.log_value(X[:, i], self.hbar)
            out[:, k] = acc
        return out

    def value(self, X) -> np.ndarray:
        return np.exp(self.log_branches(X)).sum(axis=1)

    def density(self, X) -> np.ndarray:
        return np.abs(self.value(X)) ** 2

    def branch_weights(self, X) -> np.ndarray:
        """Local share ``|branch|^2 / sum |branch|^2`` of each branch at ``X``."""
        L = self.log_branches(X).real * 2
        L = L - L.max(axis=1, keepdims=True)
        w = np.exp(L)
        return w / w.sum(axis=1, keepdims=True)

    def gram(self) -> np.ndarray:
        """Branch overlap matrix ``G[b, c] = <branch b | branch c>``."""
        n = len(self.branches)
        G = np.empty((n, n), dtype=complex)
        for i, bi in enumerate(self.branches):
            for j, bj in enumerate(self.branches):
                prod = bi.amplitude.conjugate() * bj.amplitude
                for fi, fj in zip(bi.factors, bj.factors):
                    prod *= gaussian_overlap(fi, fj, self.hbar)
                G[i, j] = prod
        return G

    def norm(self) -> float:
        return float(self.gram().sum().real)

    def normalized(self) -> "PilotWave":
        n = self.norm()
        if n < DEGENERACY_NORM:
            raise DegeneracyError(f"pilot wave norm {n:.3g} is numerically zero")
        s = 1.0 / math.sqrt(n)
        return PilotWave(tuple(replace(b, amplitude=b.amplitude * s) for b in self.branches), self.hbar)

    def marginal_density(self, j: int, xs) -> np.ndarray:
        """Exact marginal ``|Psi|^2`` of coordinate ``j`` on the points ``xs``."""
        xs = np.asarray(xs, dtype=float)
        out = np.zeros(xs.shape, dtype=complex)
        for bi in self.branches:
            for bk in self.branches:
                w = bi.amplitude.conjugate() * bk.amplitude
                for i, (fi, fk) in enumerate(zip(bi.factors, bk.factors)):
                    if i != j:
                        w *= gaussian_overlap(fi, fk, self.hbar)
                if w == 0:
                    continue
                out += w * np.conj(bi.factors[j].value(xs, self.hbar)) * bk.factors[j].value(xs, self.hbar)
        return out.real

    def without_branch(self, k: int) -> "PilotWave":
        return PilotWave(self.branches[:k] + self.branches[k + 1 :], self.hbar)


def free_evolve(wave: PilotWave, t: float) -> PilotWave:
    """Free flight for time ``t``; branch amplitudes are unchanged."""
    return PilotWave(
        tuple(replace(b, factors=tuple(f.evolved(t) for f in b.factors)) for b in wave.branches),
        wave.hbar,
    )


def prepare_singlet(up: Sequence[GaussianPacket], down: Sequence[GaussianPacket], hbar: float = HBAR) -> PilotWave:
    """Antisymmetric two-coordinate wave ``(up1 down2 - down1 up2)/sqrt(2)``.

    ``up[i]`` and ``down[i]`` are the spin-up and spin-down packets for
    coordinate i.  Branch ``"↑↓"`` comes first; that is the one a
    configuration started in its support populates.  Amplitudes are
    rescaled only if the packets overlap enough to spoil the norm.
    """
    if len(up) != 2 or len(down) != 2:
        raise InputError("singlet needs one up and one down packet per coordinate (two coordinates)")
    wave = PilotWave(
        (
            BranchWave(1 / math.sqrt(2), (up[0], down[1]), "↑↓"),
            BranchWave(-1 / math.sqrt(2), (down[0], up[1]), "↓↑"),
        ),
        hbar,
    )
    n = wave.norm()
    if n < DEGENERACY_NORM:
        raise DegeneracyError("coincident up and down packets make the singlet vanish identically")
    return wave if abs(n - 1) < 1e-15 else wave.normalized()


@dataclass(frozen=True)
class MeiosisResult:
    wave: PilotWave
    pointer_overlap: complex


def measure_meiosis(wave: PilotWave, pointer: Sequence[GaussianPacket]) -> MeiosisResult:
    """Attach the pointer coordinate: ``"↑↓"`` gets ``chi_down``, ``"↓↑"`` gets ``chi_up``.

    The pointer reads the spin of the second particle (last character of the
    branch label).  Branch amplitudes are untouched.
    """
    chi_up, chi_down = pointer
    labels = wave.labels
    if len(labels) != 2 or set(labels) != {"↑↓", "↓↑"}:
        raise InputError(f"meiosis expects the two-branch singlet, got labels {labels}")
    if chi_up.mean_position() == chi_down.mean_position() and chi_up.momentum == chi_down.momentum:
        warnings.warn("pointer states coincide: the measurement cannot distinguish the branches", stacklevel=2)
    branches = []
    for b in wave.branches:
        chi = chi_down if b.label[-1] == "↓" else chi_up
        branches.append(BranchWave(b.amplitude, b.factors + (chi,), b.label + b.label[-1]))
    return MeiosisResult(PilotWave(tuple(branches), wave.hbar), gaussian_overlap(chi_up, chi_down, wave.hbar))
