"""State and operator algebra for the coin (qubit) x walker (resonator) system.

The walker lives in a truncated Fock space of dimension ``n_max + 1`` and the
coin is a two-level system.  Joint-space indices are ordered as
``index = coin * (n_max + 1) + fock`` throughout the package, and the coin
state ``|0>`` is the +1 eigenstate of ``sigma_z``.  All builders return fresh
arrays marked read-only; nothing here mutates shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutoffTooSmallError

__all__ = [
    "FockCutoff",
    "OperatorSet",
    "coherent_state",
    "prepare_initial_joint",
    "density_from_state",
    "partial_trace_coin",
    "partial_trace_walker",
    "check_density",
]


@dataclass(frozen=True)
class FockCutoff:
    """Highest retained Fock index; walker dimension is ``n_max + 1``."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def walker_dim(self) -> int:
        return self.n_max + 1

    @property
    def joint_dim(self) -> int:
        return 2 * (self.n_max + 1)


class OperatorSet:
    """Walker and coin operators plus their joint-space lifts.

    ``a`` annihilates under truncation: ``a|n> = sqrt(n)|n-1>`` and
    ``a_dagger|n_max> = 0``, so ``[n_op, a] = -a`` holds exactly on the
    first ``n_max`` rows/columns only.  Joint-space versions carry a ``_j``
    suffix and follow the coin-major index ordering.
    """

    def __init__(self, cutoff: FockCutoff):
        self.cutoff = cutoff
        w = cutoff.walker_dim
        a = np.diag(np.sqrt(np.arange(1, w, dtype=float)), 1).astype(complex)
        # coin |0> is the +1 eigenstate of sigma_z; sigma_minus lowers the
        # energy ladder, i.e. maps |0> -> |1>.
        sz = np.diag([1.0, -1.0]).astype(complex)
        sm = np.zeros((2, 2), dtype=complex)
        sm[1, 0] = 1.0
        sp = sm.conj().T.copy()
        eye_w = np.eye(w, dtype=complex)
        eye_2 = np.eye(2, dtype=complex)

        self.a = a
        self.a_dagger = a.conj().T.copy()
        self.n_op = self.a_dagger @ a
        self.sigma_minus = sm
        self.sigma_plus = sp
        self.sigma_x = sp + sm
        self.sigma_y = -1j * sp + 1j * sm
        self.sigma_z = sz

        self.a_j = np.kron(eye_2, self.a)
        self.a_dagger_j = np.kron(eye_2, self.a_dagger)
        self.n_j = np.kron(eye_2, self.n_op)
        self.sigma_minus_j = np.kron(sm, eye_w)
        self.sigma_plus_j = np.kron(sp, eye_w)
        self.sigma_x_j = np.kron(self.sigma_x, eye_w)
        self.sigma_y_j = np.kron(self.sigma_y, eye_w)
        self.sigma_z_j = np.kron(sz, eye_w)

        for name, value in vars(self).items():
            if isinstance(value, np.ndarray):
                value.setflags(write=False)


def coherent_state(alpha: complex, cutoff: FockCutoff) -> np.ndarray:
    """Coherent-state amplitudes ``c_n = exp(-|a|^2/2) a^n / sqrt(n!)``.

    Renormalized after truncation.  Requires the safety margin
    ``|alpha|^2 + 5|alpha| <= n_max`` so the Poissonian tail fits.
    """
    mag = abs(alpha)
    if mag * mag + 5.0 * mag > cutoff.n_max:
        raise CutoffTooSmallError(
            f"|alpha|^2 + 5|alpha| = {mag * mag + 5 * mag:.2f} exceeds "
            f"n_max = {cutoff.n_max}; raise the cutoff"
        )
    vec = np.zeros(cutoff.walker_dim, dtype=complex)
    if mag == 0.0:
        vec[0] = 1.0
        return vec
    n = np.arange(cutoff.walker_dim)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    # amplitudes in log space to keep n! under control
    log_mag = -mag * mag / 2.0 + n * math.log(mag) - 0.5 * log_fact
    vec = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    vec /= np.linalg.norm(vec)
    return vec


def prepare_initial_joint(alpha: complex, cutoff: FockCutoff) -> np.ndarray:
    """Joint state ``(|0> + i|1>)/sqrt(2)`` tensored with ``|alpha>``."""
    coin = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)
    joint = np.kron(coin, coherent_state(alpha, cutoff))
    return joint / np.linalg.norm(joint)


def density_from_state(psi: np.ndarray) -> np.ndarray:
    """Outer product ``|psi><psi|``."""
    return np.outer(psi, psi.conj())


def partial_trace_coin(rho: np.ndarray, cutoff: FockCutoff) -> np.ndarray:
    """Trace out the coin: ``(rho_w)_{mn} = sum_c rho_{(c,m),(c,n)}``."""
    w = cutoff.walker_dim
    r4 = rho.reshape(2, w, 2, w)
    return r4[0, :, 0, :] + r4[1, :, 1, :]


def partial_trace_walker(rho: np.ndarray, cutoff: FockCutoff) -> np.ndarray:
    """Trace out the walker, leaving the 2x2 coin state."""
    w = cutoff.walker_dim
    r4 = rho.reshape(2, w, 2, w)
    return np.trace(r4, axis1=1, axis2=3)


def check_density(
    rho: np.ndarray,
    herm_tol: float = 1e-10,
    trace_tol: float = 1e-8,
    eig_tol: float = -1e-8,
) -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and PSD within tolerance."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"density not Hermitian: max |rho - rho^+| = {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density trace {tr!r} differs from 1 beyond {trace_tol}")
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if w.min() < eig_tol:
        raise ValueError(f"density minimum eigenvalue {w.min():.3e} below {eig_tol}")
