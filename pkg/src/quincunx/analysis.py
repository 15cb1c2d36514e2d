"""Spreading-exponent analysis: log-log regressions, decoherence sweeps and
the fixed-versus-adaptive pulse comparison.

Saturated points (Holevo spread at the infinity marker) are excluded from
every fit and reported alongside; the regression window is a caller option
because the spreading is a clean power law only between the initial-width
floor and the wrap-around saturation of the circle.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import linregress

from .dynamics import StepControl
from .errors import InsufficientPointsError, NonPositiveSigmaError
from .hilbert import partial_trace_coin
from .observables import (
    circular_skewness,
    holevo_std,
    phase_distribution,
    photon_stats,
    quadrature_moments,
)
from .protocol import WalkConfig, WalkResult, build_schedule, run_walk

__all__ = [
    "SigmaSeries",
    "RegressionRow",
    "WalkSeries",
    "loglog_regression",
    "walk_series",
    "sweep_kappa",
    "fixed_vs_adaptive_report",
    "local_slopes",
    "breakdown_step",
]


# Holevo spread at which the phase distribution has effectively wrapped the
# circle; beyond it the power-law comparison is meaningless and points are
# dropped from fits (the infinity marker is the limiting case).
SATURATION_SIGMA = 2.5


@dataclass(frozen=True)
class SigmaSeries:
    """One spreading observable versus time (or step index).

    ``excluded`` marks saturated steps (decided on the phase spread, and
    inherited by the quadrature series of the same run).
    """

    label: str  # "sigma_h" or "sigma_qp"
    times: np.ndarray
    values: np.ndarray
    excluded: np.ndarray | None = None

    def finite_mask(self) -> np.ndarray:
        mask = np.isfinite(self.values) & (self.values > 0)
        if self.excluded is not None:
            mask &= ~self.excluded
        return mask

    def windowed(self, window: tuple[int, int] | None) -> "SigmaSeries":
        """Restrict to 1-based step indices [lo, hi] (inclusive)."""
        if window is None:
            return self
        lo, hi = window
        return SigmaSeries(
            label=self.label,
            times=self.times[lo - 1: hi],
            values=self.values[lo - 1: hi],
            excluded=(self.excluded[lo - 1: hi]
                      if self.excluded is not None else None),
        )


@dataclass(frozen=True)
class RegressionRow:
    """ln(sigma) = s ln(t) + intercept, with OLS standard errors."""

    kappa: float
    s: float
    ds: float
    intercept: float
    d_intercept: float
    r: float
    n_points: int
    n_excluded: int
    degenerate: bool = False


def loglog_regression(series: SigmaSeries, kappa: float = 0.0) -> RegressionRow:
    """Ordinary least squares on (ln t, ln sigma) with (n-2)-dof errors.

    Saturated (+inf) sigma values are excluded and counted; a constant series
    is flagged degenerate (slope 0, r undefined -> 0).
    """
    finite = np.isfinite(series.values)
    if np.any(finite & (series.values <= 0)):
        raise NonPositiveSigmaError("sigma values must be > 0 for log regression")
    mask = series.finite_mask()
    n_excluded = int((~mask).sum())
    t = series.times[mask]
    sig = series.values[mask]
    if t.size < 3:
        raise InsufficientPointsError(
            f"need >= 3 finite points, have {t.size}"
        )
    x = np.log(t)
    y = np.log(sig)
    if np.allclose(y, y[0], atol=1e-14):
        return RegressionRow(
            kappa=kappa, s=0.0, ds=0.0, intercept=float(y[0]), d_intercept=0.0,
            r=0.0, n_points=int(t.size), n_excluded=n_excluded, degenerate=True,
        )
    fit = linregress(x, y)
    return RegressionRow(
        kappa=kappa,
        s=float(fit.slope),
        ds=float(fit.stderr),
        intercept=float(fit.intercept),
        d_intercept=float(fit.intercept_stderr),
        r=float(fit.rvalue),
        n_points=int(t.size),
        n_excluded=n_excluded,
    )


@dataclass
class WalkSeries:
    """All per-step observables extracted from one walk run."""

    times: np.ndarray            # snapshot times incl. t = 0
    sigma_h: np.ndarray
    sigma_qp: np.ndarray
    nbar: np.ndarray
    delta_n: np.ndarray
    skewness: np.ndarray
    qp_phi: float

    def saturated(self) -> np.ndarray:
        """Steps whose phase spread has wrapped the circle."""
        with np.errstate(invalid="ignore"):
            return ~np.isfinite(self.sigma_h) | (self.sigma_h >= SATURATION_SIGMA)

    def series(self, label: str) -> SigmaSeries:
        values = self.sigma_h if label == "sigma_h" else self.sigma_qp
        # step 0 is the initial state, never part of the spreading fit
        return SigmaSeries(label=label, times=self.times[1:],
                           values=values[1:],
                           excluded=self.saturated()[1:])


def walk_series(
    result: WalkResult,
    n_theta: int | None = None,
    qp_phi: float = math.pi / 2.0,
) -> WalkSeries:
    """Per-step observables for a walk run.

    ``sigma_qp`` is the standard deviation of the quadrature at
    local-oscillator phase ``qp_phi``; the default pi/2 reads the quadrature
    transverse to the walker's mean field, the direction along which the
    angular walk shows up at first order.
    """
    cutoff = result.config.cutoff
    if n_theta is None:
        n_theta = 4 * cutoff.n_max + 1
    sh, sq, nb, dn, sk = [], [], [], [], []
    for rho in result.densities:
        rho_w = partial_trace_coin(rho, cutoff)
        dist = phase_distribution(rho_w, n_theta)
        sh.append(holevo_std(dist))
        sk.append(circular_skewness(dist))
        stats = photon_stats(rho_w)
        nb.append(stats.n_bar)
        dn.append(stats.delta_n)
        _, std = quadrature_moments(rho_w, qp_phi)
        sq.append(std)
    return WalkSeries(
        times=np.asarray(result.times),
        sigma_h=np.asarray(sh),
        sigma_qp=np.asarray(sq),
        nbar=np.asarray(nb),
        delta_n=np.asarray(dn),
        skewness=np.asarray(sk),
        qp_phi=qp_phi,
    )


@dataclass
class SweepEntry:
    kappa_mhz: float
    series: WalkSeries | None
    row_h: RegressionRow | None
    row_qp: RegressionRow | None
    error: str | None = None
    max_trace_drift: float = 0.0
    min_eigenvalue: float = 0.0
    result: "WalkResult | None" = None


def _sweep_one(args) -> SweepEntry:
    config, kappa_internal, kappa_mhz, control, window, qp_phi, keep = args
    try:
        rates = replace(config.rates, kappa=kappa_internal)
        cfg = replace(config, rates=rates)
        schedule = build_schedule(cfg)
        result = run_walk(cfg, control=control, schedule=schedule)
        series = walk_series(result, qp_phi=qp_phi)
        row_h = loglog_regression(series.series("sigma_h").windowed(window),
                                  kappa=kappa_mhz)
        row_qp = loglog_regression(series.series("sigma_qp").windowed(window),
                                   kappa=kappa_mhz)
        min_eig = min(
            float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0).min())
            for rho in result.densities)
        return SweepEntry(kappa_mhz=kappa_mhz, series=series,
                          row_h=row_h, row_qp=row_qp,
                          max_trace_drift=result.max_trace_drift,
                          min_eigenvalue=min_eig,
                          result=result if keep else None)
    except Exception as exc:  # per-kappa failures must not kill the sweep
        return SweepEntry(kappa_mhz=kappa_mhz, series=None,
                          row_h=None, row_qp=None, error=repr(exc))


def sweep_kappa(
    config: WalkConfig,
    kappas_mhz: list[float],
    control: StepControl = StepControl(),
    window: tuple[int, int] | None = None,
    qp_phi: float = math.pi / 2.0,
    jobs: int = 1,
    kappa_scale: float | None = None,
    keep_results: bool = False,
) -> list[SweepEntry]:
    """One walk run and both regressions per decay rate, sorted by rate.

    ``kappas_mhz`` are the cyclic presentation values; ``kappa_scale``
    overrides the configured MHz-to-internal rate factor.  Failures are
    recorded per entry and the sweep continues.
    """
    from . import units

    scale = units.RATE_MHZ_TO_INTERNAL if kappa_scale is None else kappa_scale
    ordered = sorted(set(kappas_mhz))
    tasks = [
        (config, k * scale, k, control, window, qp_phi, keep_results)
        for k in ordered
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_one, tasks))
    return [_sweep_one(t) for t in tasks]


def local_slopes(series: SigmaSeries, points: int = 4) -> np.ndarray:
    """Running OLS slope over trailing ``points``-step windows.

    Entry j (0-based) is the slope over steps [j - points + 2, j + 1]
    (1-based step labels); entries before the first full window are NaN, as
    are windows touching saturated values.
    """
    n = series.values.size
    out = np.full(n, np.nan)
    logt = np.log(series.times)
    with np.errstate(divide="ignore", invalid="ignore"):
        logv = np.where(series.finite_mask(), np.log(series.values), np.nan)
    for j in range(points - 1, n):
        y = logv[j - points + 1: j + 1]
        if np.any(~np.isfinite(y)):
            continue
        fit = linregress(logt[j - points + 1: j + 1], y)
        out[j] = fit.slope
    return out


def breakdown_step(series: SigmaSeries, threshold: float = 0.7,
                   points: int = 4) -> int | None:
    """First 1-based step whose running local slope drops below threshold."""
    slopes = local_slopes(series, points=points)
    for j in range(points - 1, slopes.size):
        if np.isnan(slopes[j]) or slopes[j] < threshold:
            return j + 1
    return None


@dataclass
class FixedVsAdaptiveReport:
    adaptive: WalkSeries
    fixed: WalkSeries
    adaptive_rows: dict[str, RegressionRow]
    fixed_rows: dict[str, RegressionRow]
    adaptive_breakdown: dict[str, int | None]
    fixed_breakdown: dict[str, int | None]


def fixed_vs_adaptive_report(
    config: WalkConfig,
    control: StepControl = StepControl(),
    fixed_window: tuple[int, int] = (1, 10),
    adaptive_window: tuple[int, int] | None = None,
    qp_phi: float = math.pi / 2.0,
) -> FixedVsAdaptiveReport:
    """Run both pulse modes and regress each over its validity window.

    The fixed mode is fitted over ``fixed_window`` (default steps 1-10, the
    regime before uncompensated pulses break the walk); the adaptive mode
    over all non-saturated steps unless a window is given.  Breakdown steps
    come from the running 4-point local slope dropping below 0.7.
    """
    adaptive_cfg = replace(config, pulse_mode="adaptive")
    fixed_cfg = replace(config, pulse_mode="fixed")
    adaptive = walk_series(run_walk(adaptive_cfg, control=control), qp_phi=qp_phi)
    fixed = walk_series(run_walk(fixed_cfg, control=control), qp_phi=qp_phi)
    a_rows, f_rows, a_break, f_break = {}, {}, {}, {}
    for label in ("sigma_h", "sigma_qp"):
        a_rows[label] = loglog_regression(
            adaptive.series(label).windowed(adaptive_window),
            kappa=config.rates.kappa,
        )
        f_rows[label] = loglog_regression(
            fixed.series(label).windowed(fixed_window),
            kappa=config.rates.kappa,
        )
        a_break[label] = breakdown_step(adaptive.series(label))
        f_break[label] = breakdown_step(fixed.series(label))
    return FixedVsAdaptiveReport(
        adaptive=adaptive,
        fixed=fixed,
        adaptive_rows=a_rows,
        fixed_rows=f_rows,
        adaptive_breakdown=a_break,
        fixed_breakdown=f_break,
    )
