"""Hamiltonians and closed/open time evolution for the driven coin-walker system.

Evolution is integrated in the interaction frame rotating at the bare qubit
and resonator frequencies.  In that frame the drive-frame effective
Hamiltonian

    H_eff = chi n sz - (d_da/2) sz - d_dr n + (Omega_R/2) sx + eps (a^+ + a)

maps to the exactly equivalent

    H(t) = chi n sz
         + (Omega_R/2) (e^{-i d_da t} s+ + e^{+i d_da t} s-)     [drive on]
         + eps (e^{-i d_dr t} a^+ + e^{+i d_dr t} a)             [drive on]

which removes the fast common rotation of the walker (d_dr ~ 2000 rad/us)
from the operator norm.  This buys a ~50x larger stable step size and makes
every snapshot read directly in the frame of a local oscillator that is in
phase with the walker at t = 0, which is exactly the frame the phase and
quadrature observables are defined in.  Holevo spread is frame-invariant, so
nothing else changes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    CutoffLeakageWarning,
    DispersiveRegimeError,
    DispersiveValidityWarning,
    StepInstabilityError,
)
from .hilbert import FockCutoff, OperatorSet, density_from_state
from . import units

__all__ = [
    "SystemParams",
    "DerivedParams",
    "DriveSegment",
    "DecoherenceRates",
    "StepControl",
    "EvolutionResult",
    "build_effective_hamiltonian",
    "build_lab_hamiltonian",
    "lindblad_rhs",
    "evolve",
    "measurement_backaction",
    "classical_cavity_field",
]

TRACE_DRIFT_LIMIT = 1e-6
LEAKAGE_THRESHOLD = 1e-4


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters, all angular (rad/us).

    ``from_mhz`` accepts the cyclic presentation units (value/2pi in MHz for
    frequencies, and for rates via the 1/T1 correspondence); see
    :mod:`quincunx.units` for the calibration.
    """

    omega_a: float
    omega_r: float
    g: float
    epsilon: float
    kappa: float = 0.0
    gamma_1: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self) -> None:
        for name in ("kappa", "gamma_1", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        delta = abs(self.omega_a - self.omega_r)
        if delta < 10.0 * self.g:
            raise DispersiveRegimeError(
                f"|Delta| = {delta:.3g} below 10 g = {10 * self.g:.3g}"
            )
        if delta < 20.0 * self.g:
            warnings.warn(
                f"|Delta| = {delta:.3g} below 20 g; dispersive treatment marginal",
                DispersiveValidityWarning,
                stacklevel=2,
            )

    @classmethod
    def from_mhz(
        cls,
        omega_a: float,
        omega_r: float,
        g: float,
        epsilon: float,
        kappa: float = 0.0,
        gamma_1: float = 0.0,
        gamma_phi: float = 0.0,
    ) -> "SystemParams":
        f = units.frequency_from_mhz
        r = units.rate_from_mhz
        return cls(f(omega_a), f(omega_r), f(g), f(epsilon),
                   r(kappa), r(gamma_1), r(gamma_phi))

    @property
    def delta(self) -> float:
        return self.omega_a - self.omega_r

    def rates(self, gamma_m: float = 0.0) -> "DecoherenceRates":
        return DecoherenceRates(self.kappa, self.gamma_1, self.gamma_phi, gamma_m)

    def derived(self, omega_d: float) -> "DerivedParams":
        return DerivedParams.from_params(self, omega_d)


@dataclass(frozen=True)
class DerivedParams:
    """Detunings, cavity pull and Rabi frequency for a given drive frequency."""

    delta: float
    chi: float
    delta_da: float
    delta_dr: float
    rabi: float

    @classmethod
    def from_params(cls, params: SystemParams, omega_d: float) -> "DerivedParams":
        delta = params.omega_a - params.omega_r
        chi = params.g**2 / delta
        delta_da = omega_d - params.omega_a
        delta_dr = omega_d - params.omega_r
        rabi = 2.0 * params.g * params.epsilon / delta_dr
        return cls(delta=delta, chi=chi, delta_da=delta_da,
                   delta_dr=delta_dr, rabi=rabi)


@dataclass(frozen=True)
class DriveSegment:
    """One piecewise-constant drive interval; omega_d matters only when on."""

    duration: float
    epsilon_on: bool
    omega_d: float = 0.0

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError(f"segment duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class DecoherenceRates:
    """Lindblad rates (1/us); gamma_m is measurement-induced extra dephasing."""

    kappa: float = 0.0
    gamma_1: float = 0.0
    gamma_phi: float = 0.0
    gamma_m: float = 0.0

    def __post_init__(self) -> None:
        for name in ("kappa", "gamma_1", "gamma_phi", "gamma_m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def any_active(self) -> bool:
        return (self.kappa > 0 or self.gamma_1 > 0
                or self.gamma_phi > 0 or self.gamma_m > 0)


@dataclass(frozen=True)
class StepControl:
    """Fixed-step integrator control.

    The step obeys ``h <= min(margin / ||H||, duration / min_substeps)`` per
    segment; ``step_scale`` rescales the result (0.5 halves the step for
    convergence checks) and ``record_dense`` keeps a per-substep photon
    number trace.
    """

    margin: float = 0.1
    min_substeps: int = 10
    step_scale: float = 1.0
    record_dense: bool = False


@dataclass
class EvolutionResult:
    """Trajectory snapshots at segment boundaries plus optional dense output."""

    times: list[float]
    states: list[np.ndarray]
    dense_times: np.ndarray | None = None
    dense_nbar: np.ndarray | None = None
    max_trace_drift: float = 0.0
    max_top_level_population: float = 0.0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def build_effective_hamiltonian(
    params: SystemParams,
    derived: DerivedParams,
    epsilon_active: bool,
    ops: OperatorSet,
) -> np.ndarray:
    """Drive-frame effective Hamiltonian (static per segment).

    ``chi n sz - (d_da/2) sz - d_dr n + (Omega_R/2) sx + eps (a^+ + a)`` with
    the transverse and displacement terms zeroed when the drive is off.
    """
    delta = abs(params.delta)
    if delta < 10.0 * params.g:
        raise DispersiveRegimeError(
            f"|Delta| = {delta:.3g} below 10 g = {10 * params.g:.3g}"
        )
    h = derived.chi * (ops.n_j @ ops.sigma_z_j)
    h -= 0.5 * derived.delta_da * ops.sigma_z_j
    h -= derived.delta_dr * ops.n_j
    if epsilon_active:
        h = h + 0.5 * derived.rabi * ops.sigma_x_j
        h = h + params.epsilon * (ops.a_dagger_j + ops.a_j)
    return (h + h.conj().T) / 2.0


def build_lab_hamiltonian(
    params: SystemParams,
    omega_d: float,
    t: float,
    ops: OperatorSet,
) -> np.ndarray:
    """Lab-frame Hamiltonian with explicit drive phase; validation only."""
    h = params.omega_r * ops.n_j + 0.5 * params.omega_a * ops.sigma_z_j
    h = h + params.g * (ops.a_dagger_j @ ops.sigma_minus_j
                        + ops.a_j @ ops.sigma_plus_j)
    if params.epsilon != 0.0:
        phase = np.exp(-1j * omega_d * t)
        h = h + params.epsilon * (phase * ops.a_dagger_j
                                  + np.conj(phase) * ops.a_j)
    return (h + h.conj().T) / 2.0


def lindblad_rhs(
    rho: np.ndarray,
    hamiltonian: np.ndarray,
    rates: DecoherenceRates,
    ops: OperatorSet,
) -> np.ndarray:
    """d(rho)/dt = -i[H, rho] + kappa D[a] + gamma_1 D[s-] + (gamma_phi+gamma_m)/2 D[sz].

    Reference implementation; the integrator uses an algebraically identical
    fast path.  Output is Hermitian and traceless for Hermitian input.
    """

    def dissipator(lop: np.ndarray) -> np.ndarray:
        ld = lop.conj().T
        ldl = ld @ lop
        return lop @ rho @ ld - 0.5 * (ldl @ rho + rho @ ldl)

    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    if rates.kappa > 0:
        out += rates.kappa * dissipator(ops.a_j)
    if rates.gamma_1 > 0:
        out += rates.gamma_1 * dissipator(ops.sigma_minus_j)
    dephasing = rates.gamma_phi + rates.gamma_m
    if dephasing > 0:
        out += 0.5 * dephasing * dissipator(ops.sigma_z_j)
    return out


class _FrameGenerator:
    """Precomputed pieces of the interaction-frame Hamiltonian for one segment."""

    def __init__(
        self,
        params: SystemParams,
        rates: DecoherenceRates,
        segment: DriveSegment,
        ops: OperatorSet,
        cutoff: FockCutoff,
    ):
        w = cutoff.walker_dim
        dim = cutoff.joint_dim
        self.w = w
        self.dim = dim
        self.pulse = segment.epsilon_on
        chi = params.g**2 / (params.omega_a - params.omega_r)
        self.h_static = chi * (ops.n_j @ ops.sigma_z_j)
        self.dephasing = rates.gamma_phi + rates.gamma_m
        self.kappa = rates.kappa
        self.gamma_1 = rates.gamma_1
        # anticommutator half of the dissipators, folded into M = H - i K / 2
        kdiag = np.zeros(dim)
        kdiag += rates.kappa * np.tile(np.arange(w, dtype=float), 2)
        kdiag[:w] += rates.gamma_1          # excited-coin projector, coin 0
        kdiag += 0.5 * self.dephasing
        self.k_half = 0.5 * kdiag
        self.m_static = self.h_static - 1j * np.diag(self.k_half)
        sqrt_n = np.sqrt(np.arange(1, w, dtype=float))
        self.jump_weight = np.outer(sqrt_n, sqrt_n)
        zz = np.kron(np.array([1.0, -1.0]), np.ones(w))
        self.sz_sign = np.outer(zz, zz)
        if self.pulse:
            derived = params.derived(segment.omega_d)
            self.delta_da = derived.delta_da
            self.delta_dr = derived.delta_dr
            self.half_rabi = 0.5 * derived.rabi
            self.epsilon = params.epsilon
            # flat-index targets for the transverse coin blocks and the
            # drive side-diagonals within both coin blocks
            rows = np.arange(w)
            self.idx_coin_up = np.ravel_multi_index((rows, rows + w), (dim, dim))
            self.idx_coin_dn = np.ravel_multi_index((rows + w, rows), (dim, dim))
            r = np.arange(w - 1)
            up0 = np.ravel_multi_index((r, r + 1), (dim, dim))
            up1 = np.ravel_multi_index((r + w, r + w + 1), (dim, dim))
            self.idx_drive_up = np.concatenate([up0, up1])      # a part
            dn0 = np.ravel_multi_index((r + 1, r), (dim, dim))
            dn1 = np.ravel_multi_index((r + w + 1, r + w), (dim, dim))
            self.idx_drive_dn = np.concatenate([dn0, dn1])      # a^+ part
            self.drive_sqrt = np.concatenate([sqrt_n, sqrt_n])
        self._mbuf = np.empty((dim, dim), dtype=complex)
        self.norm_scale = self._norm_scale(params, cutoff)

    def _norm_scale(self, params: SystemParams, cutoff: FockCutoff) -> float:
        chi = abs(params.g**2 / (params.omega_a - params.omega_r))
        scale = chi * cutoff.n_max
        scale += self.kappa * cutoff.n_max + self.gamma_1 + self.dephasing
        if self.pulse:
            scale += abs(self.half_rabi) + abs(0.5 * self.delta_da)
            scale += 2.0 * abs(self.epsilon) * math.sqrt(cutoff.n_max + 1)
            # the drive phase must also be resolved
            scale = max(scale, 2.0 * abs(self.delta_dr), 2.0 * abs(self.delta_da))
        return max(scale, 1e-12)

    def hamiltonian(self, t: float) -> np.ndarray:
        """Dense interaction-frame Hamiltonian at absolute time t (fresh array)."""
        h = self.h_static.copy()
        self._add_pulse_terms(h, t)
        return h

    def _add_pulse_terms(self, target: np.ndarray, t: float) -> None:
        if not self.pulse:
            return
        flat = target.reshape(-1)
        coin_phase = self.half_rabi * np.exp(-1j * self.delta_da * t)
        # (e^{-i d_da t} s+ + h.c.): s+ couples coin 1 -> coin 0
        flat[self.idx_coin_up] += coin_phase
        flat[self.idx_coin_dn] += np.conj(coin_phase)
        drive = self.epsilon * np.exp(-1j * self.delta_dr * t)
        flat[self.idx_drive_dn] += drive * self.drive_sqrt
        flat[self.idx_drive_up] += np.conj(drive) * self.drive_sqrt

    def _build_m(self, t: float) -> np.ndarray:
        """M = H(t) - i K/2 assembled into the shared buffer."""
        np.copyto(self._mbuf, self.m_static)
        self._add_pulse_terms(self._mbuf, t)
        return self._mbuf

    def rhs_density(self, t: float, rho: np.ndarray) -> np.ndarray:
        """Lindblad RHS; assumes Hermitian rho (all RK4 stages preserve this)."""
        m = self._build_m(t)
        mr = np.matmul(m, rho)
        out = mr - mr.conj().T
        out *= -1j
        w = self.w
        if self.kappa > 0:
            out4 = out.reshape(2, w, 2, w)
            rho4 = rho.reshape(2, w, 2, w)
            out4[:, : w - 1, :, : w - 1] += self.kappa * (
                self.jump_weight[None, :, None, :] * rho4[:, 1:, :, 1:]
            )
        if self.gamma_1 > 0:
            out4 = out.reshape(2, w, 2, w)
            rho4 = rho.reshape(2, w, 2, w)
            out4[1, :, 1, :] += self.gamma_1 * rho4[0, :, 0, :]
        if self.dephasing > 0:
            out += (0.5 * self.dephasing) * (self.sz_sign * rho)
        return out

    def rhs_state(self, t: float, psi: np.ndarray) -> np.ndarray:
        m = self._build_m(t)
        out = np.matmul(m, psi)
        out *= -1j
        return out


def _segment_steps(duration: float, scale: float, control: StepControl) -> int:
    h = min(control.margin / scale, duration / control.min_substeps)
    h *= control.step_scale
    return max(int(math.ceil(duration / h)), control.min_substeps)


def _nbar_state(psi: np.ndarray, w: int) -> float:
    p = np.abs(psi) ** 2
    n = np.tile(np.arange(w, dtype=float), 2)
    return float(np.dot(n, p))


def _nbar_density(rho: np.ndarray, w: int) -> float:
    d = np.diag(rho).real
    n = np.tile(np.arange(w, dtype=float), 2)
    return float(np.dot(n, d))


def evolve(
    state_or_density: np.ndarray,
    segments: list[DriveSegment],
    params: SystemParams,
    rates: DecoherenceRates,
    cutoff: FockCutoff,
    control: StepControl = StepControl(),
    ops: OperatorSet | None = None,
) -> EvolutionResult:
    """Integrate through the drive segments with classical fixed-step RK4.

    A state vector with all rates zero follows the pure Schroedinger path;
    any active rate promotes the input to a density matrix and integrates the
    master equation.  Snapshots are taken at every segment boundary.  The
    density is re-symmetrized after every step; trace drift beyond 1e-6 in a
    segment raises :class:`StepInstabilityError` and population above 1e-4 in
    the top three Fock levels triggers :class:`CutoffLeakageWarning`.
    """
    if not segments:
        raise ValueError("segments must be non-empty")
    if ops is None:
        ops = OperatorSet(cutoff)
    w = cutoff.walker_dim
    dim = cutoff.joint_dim
    if state_or_density.shape not in ((dim,), (dim, dim)):
        raise ValueError(
            f"state shape {state_or_density.shape} incompatible with joint dim {dim}"
        )

    pure = state_or_density.ndim == 1 and not rates.any_active
    if state_or_density.ndim == 1 and rates.any_active:
        state = density_from_state(state_or_density)
    else:
        state = state_or_density.astype(complex).copy()

    t = 0.0
    times = [0.0]
    states = [state.copy()]
    dense_t: list[float] = []
    dense_n: list[float] = []
    max_drift = 0.0
    max_top = 0.0
    warned_leak = False

    nbar_of = (lambda s: _nbar_state(s, w)) if pure else (lambda s: _nbar_density(s, w))
    if control.record_dense:
        dense_t.append(0.0)
        dense_n.append(nbar_of(state))

    for segment in segments:
        gen = _FrameGenerator(params, rates, segment, ops, cutoff)
        n_steps = _segment_steps(segment.duration, gen.norm_scale, control)
        h = segment.duration / n_steps
        rhs = gen.rhs_state if pure else gen.rhs_density
        for _ in range(n_steps):
            k1 = rhs(t, state)
            k2 = rhs(t + 0.5 * h, state + (0.5 * h) * k1)
            k3 = rhs(t + 0.5 * h, state + (0.5 * h) * k2)
            k4 = rhs(t + h, state + h * k3)
            state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
            if pure:
                state /= np.linalg.norm(state)
            else:
                state = (state + state.conj().T) / 2.0
            if control.record_dense:
                dense_t.append(t)
                dense_n.append(nbar_of(state))
        if not pure:
            drift = abs(np.trace(state).real - 1.0)
            max_drift = max(max_drift, drift)
            if drift > TRACE_DRIFT_LIMIT:
                raise StepInstabilityError(
                    f"trace drift {drift:.3e} beyond {TRACE_DRIFT_LIMIT} at t={t:.6f}"
                )
            # RK4 preserves the trace exactly (linear invariant), so a blown
            # step shows up in the matrix norm instead
            fro = float(np.linalg.norm(state))
            if not math.isfinite(fro) or fro > 2.0:
                raise StepInstabilityError(
                    f"density norm {fro:.3e} at t={t:.6f}; reduce the step size"
                )
            diag = np.diag(state).real
        else:
            diag = np.abs(state) ** 2
        top = float(diag[w - 3: w].sum() + diag[dim - 3: dim].sum())
        max_top = max(max_top, top)
        if top > LEAKAGE_THRESHOLD and not warned_leak:
            warnings.warn(
                f"population {top:.2e} in top 3 Fock levels; raise n_max",
                CutoffLeakageWarning,
                stacklevel=2,
            )
            warned_leak = True
        times.append(t)
        states.append(state.copy())

    return EvolutionResult(
        times=times,
        states=states,
        dense_times=np.asarray(dense_t) if control.record_dense else None,
        dense_nbar=np.asarray(dense_n) if control.record_dense else None,
        max_trace_drift=max_drift,
        max_top_level_population=max_top,
    )


def measurement_backaction(
    chi_b: float,
    alpha_b: complex,
    kappa_b: float,
    omega_a: float,
) -> tuple[float, float]:
    """Readout-resonator backaction on the qubit.

    Returns the shifted qubit frequency ``omega_a + 2 chi_b (|alpha_b|^2 + 1/2)``
    and the measurement-induced dephasing ``8 chi_b^2 |alpha_b|^2 / kappa_b``.
    """
    if kappa_b <= 0:
        raise ValueError("kappa_b must be > 0")
    photons = abs(alpha_b) ** 2
    omega_prime = omega_a + 2.0 * chi_b * (photons + 0.5)
    gamma_m = 8.0 * chi_b**2 * photons / kappa_b
    return omega_prime, gamma_m


def classical_cavity_field(
    epsilon_b: float,
    delta_rb: float,
    kappa_b: float,
    t: float,
) -> complex:
    """Classical readout-cavity field from rest under a constant drive.

    Closed-form solution of ``d(alpha)/dt = -i d_rb alpha - (kappa_b/2) alpha
    - i eps_b`` with ``alpha(0) = 0``.
    """
    if kappa_b <= 0:
        raise ValueError("kappa_b must be > 0")
    pole = 1j * delta_rb + 0.5 * kappa_b
    steady = -1j * epsilon_b / pole
    return steady * (1.0 - np.exp(-pole * t))
