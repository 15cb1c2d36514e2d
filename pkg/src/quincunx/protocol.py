"""The walk pulse program: validation, precomputation, scheduling, execution.

A walk step is one drive pulse (coin flip plus small displacement) followed
by free evolution (coin-conditioned phase-space rotation).  Pulse durations
and the drive frequency follow the step-resolved mean photon number, which is
precomputed on the closed system with the step-zero pulse length everywhere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    DecoherenceRates,
    DriveSegment,
    StepControl,
    SystemParams,
    evolve,
)
from .errors import NonPositiveDurationError, WalkBoundWarning
from .hilbert import FockCutoff, OperatorSet, density_from_state, prepare_initial_joint
from . import units

__all__ = [
    "WalkConfig",
    "BoundCheck",
    "ValidationReport",
    "PhotonTrajectory",
    "ScheduleStep",
    "PulseSchedule",
    "WalkResult",
    "validate_config",
    "hadamard_duration",
    "drive_frequency",
    "step_angle",
    "tau_for_step_angle",
    "precompute_photon_trajectory",
    "build_schedule",
    "run_walk",
]

PULSE_MODES = ("adaptive", "fixed", "frequency")


@dataclass(frozen=True)
class WalkConfig:
    """Full description of one walk run.

    ``tau = None`` selects the free-evolution time that makes the per-step
    angle equal to the lattice spacing ``2 pi / d``.
    """

    alpha: float
    d: int
    n_steps: int
    params: SystemParams
    rates: DecoherenceRates
    cutoff: FockCutoff
    tau: float | None = None
    pulse_mode: str = "adaptive"

    def __post_init__(self) -> None:
        if self.pulse_mode not in PULSE_MODES:
            raise ValueError(f"pulse_mode must be one of {PULSE_MODES}")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if self.d < 2:
            raise ValueError("d must be >= 2")

    @property
    def n_bar_0(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def lattice_angle(self) -> float:
        return 2.0 * math.pi / self.d

    def resolved_tau(self) -> float:
        if self.tau is not None:
            return self.tau
        t_h0 = hadamard_duration(self.n_bar_0, self.params)
        derived = self.params.derived(drive_frequency(self.n_bar_0, self.params))
        return tau_for_step_angle(self.lattice_angle, t_h0, derived)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    severity: str  # "error" for mandatory bounds, "warning" for advisory ones
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[BoundCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def hard_failures(self) -> tuple[BoundCheck, ...]:
        return tuple(c for c in self.checks
                     if not c.passed and c.severity == "error")

    def format(self) -> str:
        lines = []
        for c in self.checks:
            status = "ok" if c.passed else f"violated ({c.severity})"
            lines.append(f"{c.name}: {status} — {c.detail}")
        return "\n".join(lines)


def validate_config(config: WalkConfig) -> ValidationReport:
    """Check the site-count window, the step bound and the critical photon number.

    Violations are reported, never raised: the lower site bound and the
    critical photon number are hard requirements, while the upper site bound
    and the step bound are advisory (the reference parameter set itself sits
    above the upper site bound).
    """
    n0 = config.n_bar_0
    root = math.sqrt(n0)
    d_low = n0 + root
    d_high = 2.0 * math.pi * root
    n_crit = config.params.delta**2 / (4.0 * config.params.g**2)
    checks = (
        BoundCheck(
            "d_lower_bound",
            config.d > d_low,
            "error",
            f"need nbar0 + sqrt(nbar0) = {d_low:.3f} < d = {config.d}",
        ),
        BoundCheck(
            "d_upper_bound",
            config.d < d_high,
            "warning",
            f"need d = {config.d} < 2 pi sqrt(nbar0) = {d_high:.3f}",
        ),
        BoundCheck(
            "step_bound",
            config.n_steps < d_high,
            "warning",
            f"need N = {config.n_steps} < 2 pi sqrt(nbar0) = {d_high:.3f}",
        ),
        BoundCheck(
            "critical_photon_number",
            n0 < n_crit,
            "error",
            f"need nbar0 = {n0:.3f} < Delta^2/(4 g^2) = {n_crit:.3f}",
        ),
    )
    return ValidationReport(checks=checks)


def hadamard_duration(n_bar: float, params: SystemParams) -> float:
    """Coin-flip pulse duration (us) for a walker holding ``n_bar`` photons.

    ``t_H = pi [Delta + 2 (nbar + 1) chi - 2 g eps / Delta] / (4 g eps)``
    evaluated on the cyclic (MHz) presentation of the parameters, which is
    the placement that reproduces the 0.01567 us anchor (see units module).
    """
    if n_bar < 0:
        raise ValueError("n_bar must be >= 0")
    f = units.frequency_to_mhz
    delta = f(params.omega_a) - f(params.omega_r)
    g = f(params.g)
    eps = f(params.epsilon)
    chi = g * g / delta
    value = math.pi * (delta + 2.0 * (n_bar + 1.0) * chi
                       - 2.0 * g * eps / delta) / (4.0 * g * eps)
    if value <= 0:
        raise NonPositiveDurationError(
            f"pulse duration {value:.3e} us for n_bar = {n_bar}"
        )
    return value


def drive_frequency(n_bar: float, params: SystemParams) -> float:
    """Drive frequency ``2 nbar g^2/Delta - 2 g eps/Delta + omega_a`` (internal units)."""
    delta = params.delta
    return (2.0 * n_bar * params.g**2 / delta
            - 2.0 * params.g * params.epsilon / delta
            + params.omega_a)


def step_angle(t_h: float, tau: float, derived) -> float:
    """Per-step angular displacement ``|g^2 (tau + t_H) / Delta|``."""
    if t_h <= 0 or tau <= 0:
        raise ValueError("durations must be > 0")
    return abs(derived.chi) * (tau + t_h)


def tau_for_step_angle(delta_theta: float, t_h: float, derived) -> float:
    """Free-evolution time solving ``step_angle = delta_theta`` for given t_H."""
    tau = delta_theta / abs(derived.chi) - t_h
    if tau <= 0:
        raise NonPositiveDurationError(
            f"free time {tau:.3e} us solving step angle {delta_theta:.3f}"
        )
    return tau


@dataclass(frozen=True)
class PhotonTrajectory:
    """Dense closed-system photon-number trace and its per-step averages."""

    times: np.ndarray
    nbar: np.ndarray
    window: float
    nbar_steps: tuple[float, ...]  # time average over step windows 1..N


def precompute_photon_trajectory(
    config: WalkConfig,
    control: StepControl = StepControl(),
) -> PhotonTrajectory:
    """Closed-system (rates off) pre-simulation with the step-zero pulse everywhere.

    The per-step photon number ``nbar_j`` is the trapezoidal time average of
    the dense ``nbar(t)`` over the j-th window of length ``t_H0 + tau``.
    """
    t_h0 = hadamard_duration(config.n_bar_0, config.params)
    omega_d0 = drive_frequency(config.n_bar_0, config.params)
    tau = config.resolved_tau()
    segments = []
    for _ in range(config.n_steps):
        segments.append(DriveSegment(t_h0, True, omega_d0))
        segments.append(DriveSegment(tau, False))
    psi0 = prepare_initial_joint(config.alpha, config.cutoff)
    if not segments:
        return PhotonTrajectory(
            times=np.array([0.0]),
            nbar=np.array([config.n_bar_0]),
            window=t_h0 + tau,
            nbar_steps=(),
        )
    dense_control = StepControl(
        margin=control.margin,
        min_substeps=control.min_substeps,
        step_scale=control.step_scale,
        record_dense=True,
    )
    result = evolve(
        psi0, segments, config.params, DecoherenceRates(), config.cutoff,
        control=dense_control,
    )
    times = result.dense_times
    nbar = result.dense_nbar
    window = t_h0 + tau
    averages = []
    for j in range(1, config.n_steps + 1):
        lo, hi = (j - 1) * window, j * window
        grid = np.linspace(lo, hi, 201)
        averages.append(float(np.trapezoid(np.interp(grid, times, nbar), grid)
                              / window))
    return PhotonTrajectory(
        times=times, nbar=nbar, window=window, nbar_steps=tuple(averages)
    )


@dataclass(frozen=True)
class ScheduleStep:
    t_h: float
    omega_d: float
    tau: float


@dataclass(frozen=True)
class PulseSchedule:
    steps: tuple[ScheduleStep, ...]
    n_bar_sequence: tuple[float, ...]

    def segments(self) -> list[DriveSegment]:
        out = []
        for s in self.steps:
            out.append(DriveSegment(s.t_h, True, s.omega_d))
            out.append(DriveSegment(s.tau, False))
        return out

    @property
    def total_duration(self) -> float:
        return sum(s.t_h + s.tau for s in self.steps)


def build_schedule(
    config: WalkConfig,
    trajectory: PhotonTrajectory | None = None,
) -> PulseSchedule:
    """Pulse program for the configured mode.

    The pulse of step j is matched to the photon number of the preceding
    window (step 1 uses ``nbar_0 = |alpha|^2``), which is the causally
    available estimate.  Fixed mode repeats the step-zero pulse; frequency
    mode keeps the duration fixed and retunes only the drive frequency.
    """
    t_h0 = hadamard_duration(config.n_bar_0, config.params)
    omega_d0 = drive_frequency(config.n_bar_0, config.params)
    tau = config.resolved_tau()
    n = config.n_steps
    if config.pulse_mode == "fixed" or n == 0:
        nbars = tuple(config.n_bar_0 for _ in range(n))
        steps = tuple(ScheduleStep(t_h0, omega_d0, tau) for _ in range(n))
        return PulseSchedule(steps=steps, n_bar_sequence=nbars)
    if trajectory is None:
        trajectory = precompute_photon_trajectory(config)
    if len(trajectory.nbar_steps) < n - 1:
        raise ValueError("photon trajectory shorter than the requested walk")
    nbars = (config.n_bar_0,) + trajectory.nbar_steps[: n - 1]
    steps = []
    for nb in nbars:
        if config.pulse_mode == "adaptive":
            steps.append(ScheduleStep(
                hadamard_duration(nb, config.params),
                drive_frequency(nb, config.params),
                tau,
            ))
        else:  # frequency mode
            steps.append(ScheduleStep(
                t_h0, drive_frequency(nb, config.params), tau,
            ))
    return PulseSchedule(steps=tuple(steps), n_bar_sequence=nbars)


@dataclass
class WalkResult:
    """Per-step snapshots (after each free segment) and run diagnostics."""

    config: WalkConfig
    schedule: PulseSchedule
    times: list[float]
    densities: list[np.ndarray]
    max_trace_drift: float
    max_top_level_population: float

    @property
    def n_steps(self) -> int:
        return len(self.densities) - 1


def run_walk(
    config: WalkConfig,
    control: StepControl = StepControl(),
    schedule: PulseSchedule | None = None,
    ops: OperatorSet | None = None,
) -> WalkResult:
    """Execute the walk and return N+1 joint densities (initial plus one per step).

    Advisory bound violations are emitted as :class:`WalkBoundWarning`; hard
    violations are the caller's responsibility (see
    :func:`validate_config`).
    """
    report = validate_config(config)
    for check in report.checks:
        if not check.passed:
            warnings.warn(f"{check.name}: {check.detail}", WalkBoundWarning,
                          stacklevel=2)
    if schedule is None:
        schedule = build_schedule(config)
    psi0 = prepare_initial_joint(config.alpha, config.cutoff)
    if config.n_steps == 0:
        return WalkResult(
            config=config, schedule=schedule, times=[0.0],
            densities=[density_from_state(psi0)],
            max_trace_drift=0.0, max_top_level_population=0.0,
        )
    state0 = psi0 if not config.rates.any_active else density_from_state(psi0)
    result = evolve(
        state0, schedule.segments(), config.params, config.rates,
        config.cutoff, control=control, ops=ops,
    )
    # boundary snapshots alternate pulse-end / free-end; keep free ends only
    times = [result.times[0]] + result.times[2::2]
    states = [result.states[0]] + result.states[2::2]
    densities = [
        density_from_state(s) if s.ndim == 1 else s for s in states
    ]
    return WalkResult(
        config=config,
        schedule=schedule,
        times=times,
        densities=densities,
        max_trace_drift=result.max_trace_drift,
        max_top_level_population=result.max_top_level_population,
    )
