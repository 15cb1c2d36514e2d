"""Closed-form reference models: ideal coined walk on a d-cycle, the exact
classical random walk, and the displaced-circle approximation in Fock space.

These are small brute-force oracles, independent of the main integrator, used
to pin the quantum (sigma ~ t) and classical (sigma ~ sqrt(t)) spreading
signatures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import CutoffLeakageWarning, WrapAroundWarning
from .hilbert import FockCutoff, OperatorSet
from .observables import (
    AngularDistribution,
    circular_rms_std,
    holevo_std,
    photon_stats,
)

__all__ = [
    "CycleWalkState",
    "ClassicalWalkDist",
    "symmetric_coin",
    "ideal_qw_step",
    "ideal_qw_sigma",
    "classical_rw_dist",
    "classical_rw_sigma",
    "displaced_circle_step",
    "displaced_circle_run",
    "site_distribution",
]

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class CycleWalkState:
    """Coin x site amplitudes on the d-cycle, shape (2, d); unit norm."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.ndim != 2 or self.amplitudes.shape[0] != 2:
            raise ValueError("amplitudes must have shape (2, d)")

    @property
    def d(self) -> int:
        return self.amplitudes.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class ClassicalWalkDist:
    """Site probabilities of the random walk after ``step`` steps."""

    probabilities: np.ndarray
    step: int


def symmetric_coin() -> np.ndarray:
    """The coin ``(|0> + i|1>)/sqrt(2)`` that spreads the walk symmetrically."""
    return np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0)


def initial_cycle_state(d: int, site: int = 0,
                        coin: np.ndarray | None = None) -> CycleWalkState:
    if coin is None:
        coin = symmetric_coin()
    amp = np.zeros((2, d), dtype=complex)
    amp[:, site] = coin
    return CycleWalkState(amplitudes=amp)


def ideal_qw_step(state: CycleWalkState) -> CycleWalkState:
    """Coin Hadamard followed by the coin-conditioned cyclic shift.

    Coin 0 (the +1 eigenstate of sigma_z) shifts the site index up by one;
    coin 1 shifts it down.
    """
    amp = HADAMARD @ state.amplitudes
    out = np.empty_like(amp)
    out[0] = np.roll(amp[0], 1)
    out[1] = np.roll(amp[1], -1)
    return CycleWalkState(amplitudes=out)


def site_distribution(state: CycleWalkState) -> AngularDistribution:
    """Site marginal as an angular distribution on the d-point lattice."""
    d = state.d
    theta = 2.0 * math.pi * np.arange(d) / d
    prob = np.sum(np.abs(state.amplitudes) ** 2, axis=0)
    # density convention: sum(values) * (2 pi / d) = 1
    return AngularDistribution(theta=theta, values=prob * d / (2.0 * math.pi))


def ideal_qw_sigma(
    d: int,
    n_steps: int,
    coin_init: np.ndarray | None = None,
    kind: str = "holevo",
) -> list[float]:
    """Angular spread of the coined walk after each of 1..n_steps steps.

    ``kind`` selects the Holevo spread or the circular RMS deviation.  Walks
    with ``n_steps >= d/2`` wrap around the cycle and are flagged.
    """
    if n_steps >= d / 2:
        warnings.warn(
            f"N = {n_steps} >= d/2 = {d / 2}: walk wraps around the cycle",
            WrapAroundWarning,
            stacklevel=2,
        )
    measure = holevo_std if kind == "holevo" else circular_rms_std
    state = initial_cycle_state(d, coin=coin_init)
    out = []
    for _ in range(n_steps):
        state = ideal_qw_step(state)
        out.append(measure(site_distribution(state)))
    return out


def classical_rw_dist(d: int, n_steps: int, p: float = 0.5) -> list[ClassicalWalkDist]:
    """Exact convolution of the +-1 random walk on the cycle, one entry per step."""
    prob = np.zeros(d)
    prob[0] = 1.0
    out = []
    for step in range(1, n_steps + 1):
        prob = p * np.roll(prob, 1) + (1.0 - p) * np.roll(prob, -1)
        out.append(ClassicalWalkDist(probabilities=prob.copy(), step=step))
    return out


def classical_rw_sigma(d: int, n_steps: int, p: float = 0.5,
                       kind: str = "holevo") -> list[float]:
    """Angular spread of the exact random walk after each step."""
    measure = holevo_std if kind == "holevo" else circular_rms_std
    theta = 2.0 * math.pi * np.arange(d) / d
    out = []
    for dist in classical_rw_dist(d, n_steps, p):
        angular = AngularDistribution(
            theta=theta, values=dist.probabilities * d / (2.0 * math.pi)
        )
        out.append(measure(angular))
    return out


def displaced_circle_step(
    state: np.ndarray,
    delta_theta: float,
    lam: float,
    ops: OperatorSet,
) -> np.ndarray:
    """One step of the displaced-circle model in the truncated joint space.

    Applies the coin Hadamard together with the walker displacement
    ``D(i lam / sqrt(2))``, then the coin-conditioned rotation
    ``exp(i n sz dtheta)``.
    """
    w = ops.cutoff.walker_dim
    psi = state.reshape(2, w)
    psi = HADAMARD @ psi
    if lam != 0.0:
        beta = 1j * lam / math.sqrt(2.0)
        disp = expm(beta * ops.a_dagger - np.conj(beta) * ops.a)
        psi = psi @ disp.T
    n = np.arange(w)
    phase_up = np.exp(1j * n * delta_theta)
    psi = np.vstack([psi[0] * phase_up, psi[1] * phase_up.conj()])
    top = float((np.abs(psi[:, w - 3:]) ** 2).sum())
    if top > 1e-4:
        warnings.warn(
            f"population {top:.2e} in top 3 Fock levels after displacement",
            CutoffLeakageWarning,
            stacklevel=2,
        )
    return psi.reshape(-1)


def displaced_circle_run(
    alpha: float,
    delta_theta: float,
    lam: float,
    n_steps: int,
    cutoff: FockCutoff,
    coin_init: np.ndarray | None = None,
):
    """Run the displaced-circle model from ``(coin) x |alpha>``.

    Returns (states, photon stats per step) with states including t = 0.
    """
    from .hilbert import coherent_state

    if coin_init is None:
        coin_init = symmetric_coin()
    ops = OperatorSet(cutoff)
    psi = np.kron(coin_init, coherent_state(alpha, cutoff))
    states = [psi]
    stats = [photon_stats(_walker_density(psi, cutoff))]
    for _ in range(n_steps):
        psi = displaced_circle_step(psi, delta_theta, lam, ops)
        states.append(psi)
        stats.append(photon_stats(_walker_density(psi, cutoff)))
    return states, stats


def _walker_density(psi: np.ndarray, cutoff: FockCutoff) -> np.ndarray:
    w = cutoff.walker_dim
    p = psi.reshape(2, w)
    return p[0][:, None] * p[0].conj()[None, :] + p[1][:, None] * p[1].conj()[None, :]
