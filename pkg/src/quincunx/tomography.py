"""Homodyne readout simulation and Wigner reconstruction.

The forward model draws quadrature samples from P_phi(x) and adds zero-mean
Gaussian amplifier noise of variance ``n_thermal`` (a thermal occupation of
20 swamps the vacuum width of 1/2, which is the realistic regime).  The
inverse is standard filtered back-projection over the local-oscillator
phases, with the thermal smearing divided out slice-by-slice in the Fourier
domain under a hard frequency cutoff.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DeconvolutionWarning, InsufficientAnglesError
from .observables import (
    AngularDistribution,
    WignerGrid,
    quadrature_distribution,
)

__all__ = [
    "HomodyneRecord",
    "ReconstructionResult",
    "simulate_homodyne",
    "reconstruct",
    "default_attenuation_cutoff",
]

MIN_ANGLES = 12
DEFAULT_ATTENUATION = 1e-2
AMPLIFICATION_WARNING = 1e3


@dataclass(frozen=True)
class HomodyneRecord:
    """Quadrature samples at one local-oscillator phase."""

    phi: float
    samples: np.ndarray
    n_thermal: float

    def __post_init__(self) -> None:
        if self.n_thermal < 0:
            raise ValueError("n_thermal must be >= 0")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")


@dataclass
class ReconstructionResult:
    wigner: WignerGrid
    phase_dist: AngularDistribution
    cutoff_frequency: float
    amplification: float
    bins: int


def simulate_homodyne(
    rho_w: np.ndarray,
    phi: float,
    shots: int,
    n_thermal: float = 0.0,
    seed: int | None = None,
) -> HomodyneRecord:
    """Draw homodyne samples: P_phi(x) convolved with the thermal Gaussian.

    Sampling inverts the cumulative of the exact quadrature distribution on a
    fine grid, then adds N(0, n_thermal) amplifier noise; identical seeds
    give identical records.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    dim = rho_w.shape[0]
    n_bar = float(np.sum(np.diag(rho_w).real * np.arange(dim)))
    span = math.sqrt(2.0 * max(n_bar, 0.0)) + 6.0
    x = np.linspace(-span, span, 4001)
    dist = quadrature_distribution(rho_w, phi, x)
    cdf = np.cumsum(dist.values)
    cdf = cdf / cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(shots)
    samples = np.interp(u, cdf, x)
    if n_thermal > 0:
        samples = samples + math.sqrt(n_thermal) * rng.standard_normal(shots)
    return HomodyneRecord(phi=phi, samples=samples, n_thermal=n_thermal)


def default_attenuation_cutoff(n_thermal: float,
                               attenuation: float = DEFAULT_ATTENUATION) -> float:
    """Frequency where the thermal Gaussian attenuates to ``attenuation``."""
    if n_thermal <= 0:
        return math.inf
    return math.sqrt(-2.0 * math.log(attenuation) / n_thermal)


def _freedman_diaconis_bins(samples: np.ndarray, lo: float, hi: float) -> int:
    q75, q25 = np.percentile(samples, [75.0, 25.0])
    iqr = q75 - q25
    if iqr <= 0:
        return 64
    width = 2.0 * iqr / len(samples) ** (1.0 / 3.0)
    return max(64, int(math.ceil((hi - lo) / width)))


def _filtered_projection(
    density: np.ndarray,
    dx: float,
    n_thermal: float,
    k_cut: float,
    bandwidth: float,
    pad_to: int,
    offset: int,
) -> np.ndarray:
    """Ramp-filtered, thermally deconvolved projection on the padded grid.

    Zero-padding both refines the frequency sampling of the ramp kernel and
    extends the projection's slowly decaying negative tails over the whole
    back-projection range.  ``bandwidth`` is the shot-noise band limit shared
    by the filtered and unfiltered paths; ``k_cut`` is the thermal
    deconvolution cutoff on top of it.
    """
    padded = np.zeros(pad_to)
    padded[offset: offset + density.size] = density
    k = 2.0 * math.pi * np.fft.fftfreq(pad_to, d=dx)
    live = np.abs(k) <= min(k_cut, bandwidth)
    spectrum = np.fft.fft(padded)
    if n_thermal > 0:
        exponent = 0.5 * n_thermal * np.where(live, k * k, 0.0)
        spectrum = spectrum * np.exp(exponent) * live
    else:
        spectrum = spectrum * live
    return np.fft.ifft(np.abs(k) * spectrum).real


def _noise_bandwidth(projections: np.ndarray, dx: float) -> float:
    """Highest frequency at which the mean record spectrum beats shot noise.

    The noise floor is estimated from the top of the frequency range, where
    finite-shot histograms are white; the band limit is the last frequency
    whose magnitude exceeds four times that floor.
    """
    m = projections.shape[1]
    k = 2.0 * math.pi * np.fft.rfftfreq(m, d=dx)
    mag = np.abs(np.fft.rfft(projections, axis=1)).mean(axis=0)
    tail = mag[int(0.7 * mag.size):]
    floor = float(np.median(tail)) if tail.size else 0.0
    if floor <= 0:
        return float(k[-1])
    above = np.nonzero(mag >= 4.0 * floor)[0]
    if above.size == 0:
        return float(k[min(8, k.size - 1)])
    edge = min(above[-1] + 1, k.size - 1)
    return float(k[edge])


def reconstruct(
    records: list[HomodyneRecord],
    x_grid: np.ndarray,
    p_grid: np.ndarray,
    filter_cutoff: float | None = None,
    n_radial: int = 200,
    n_angular: int = 256,
) -> ReconstructionResult:
    """Filtered back-projection of histogrammed homodyne data.

    Needs at least 12 phases spanning [0, pi).  The thermal deconvolution
    divides each Radon slice by the noise Gaussian up to ``filter_cutoff``
    (default: the frequency where the attenuation reaches 1e-2); cutoffs
    admitting amplification beyond 1e3 are allowed but flagged.  The phase
    distribution is the radial integral of the reconstructed Wigner function.
    """
    if len(records) < MIN_ANGLES:
        raise InsufficientAnglesError(
            f"need >= {MIN_ANGLES} phases, have {len(records)}"
        )
    phis = np.array([r.phi for r in records])
    span = phis.max() - phis.min()
    if span < 0.9 * math.pi * (len(records) - 1) / len(records):
        raise InsufficientAnglesError(
            f"phases span only {span:.3f} rad; need coverage of [0, pi)"
        )
    n_thermal = records[0].n_thermal
    if filter_cutoff is None:
        filter_cutoff = default_attenuation_cutoff(n_thermal)
    amplification = (
        math.exp(0.5 * n_thermal * filter_cutoff**2)
        if np.isfinite(filter_cutoff) else 1.0
    )
    if amplification > AMPLIFICATION_WARNING:
        warnings.warn(
            f"deconvolution amplification {amplification:.2e} beyond "
            f"{AMPLIFICATION_WARNING:.0e}",
            DeconvolutionWarning,
            stacklevel=2,
        )

    lo = min(r.samples.min() for r in records)
    hi = max(r.samples.max() for r in records)
    bins = max(_freedman_diaconis_bins(records[0].samples, lo, hi), 64)
    edges = np.linspace(lo, hi, bins + 1)
    centers = (edges[:-1] + edges[1:]) / 2.0
    dx = centers[1] - centers[0]

    # pad so the projection grid covers every back-projection query and the
    # ramp kernel is finely sampled in frequency
    t_reach = math.hypot(max(abs(float(x_grid[0])), abs(float(x_grid[-1]))),
                         max(abs(float(p_grid[0])), abs(float(p_grid[-1]))))
    pad_left = max(int(math.ceil((centers[0] + t_reach) / dx)) + 1, 0)
    need = bins + pad_left + max(int(math.ceil((t_reach - centers[-1]) / dx)) + 1, 0)
    pad_to = 1 << max(int(math.ceil(math.log2(max(need, 8 * bins)))), 3)
    pad_centers = centers[0] + dx * (np.arange(pad_to) - pad_left)

    order = np.argsort(phis)
    densities = np.empty((len(records), bins))
    for row, idx in enumerate(order):
        counts, _ = np.histogram(records[idx].samples, bins=edges)
        densities[row] = counts / (counts.sum() * dx)
    bandwidth = _noise_bandwidth(densities, dx)
    projections = np.empty((len(records), pad_to))
    for row, idx in enumerate(order):
        rec = records[idx]
        k_cut = filter_cutoff if np.isfinite(filter_cutoff) \
            else math.pi / dx
        projections[row] = _filtered_projection(densities[row], dx,
                                                rec.n_thermal, k_cut,
                                                bandwidth, pad_to, pad_left)
    centers = pad_centers
    sorted_phis = phis[order]

    xs, ps = np.meshgrid(x_grid, p_grid)
    values = np.zeros_like(xs)
    for row, phi in enumerate(sorted_phis):
        t = xs * math.cos(phi) + ps * math.sin(phi)
        values += np.interp(t, centers, projections[row], left=0.0, right=0.0)
    values *= math.pi / len(records) / (2.0 * math.pi)
    wig = WignerGrid(x=x_grid, p=p_grid, values=values)

    # angular integration of W over radius -> phase distribution
    r_max = min(abs(x_grid).max(), abs(p_grid).max())
    radii = np.linspace(0.0, r_max, n_radial)
    thetas = np.linspace(0.0, 2.0 * math.pi, n_angular, endpoint=False)
    rr, tt = np.meshgrid(radii, thetas)
    sample_x = rr * np.cos(tt)
    sample_p = rr * np.sin(tt)
    interp_vals = _bilinear(wig, sample_x, sample_p)
    pdist = np.trapezoid(interp_vals * rr, radii, axis=1)
    pdist = np.clip(pdist, 0.0, None)
    total = pdist.sum() * (2.0 * math.pi / n_angular)
    if total > 0:
        pdist = pdist / total
    phase = AngularDistribution(theta=thetas, values=pdist)
    return ReconstructionResult(
        wigner=wig,
        phase_dist=phase,
        cutoff_frequency=float(filter_cutoff),
        amplification=float(amplification),
        bins=bins,
    )


def _bilinear(grid: WignerGrid, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Bilinear interpolation on the Wigner grid, zero outside."""
    gx, gp, v = grid.x, grid.p, grid.values
    ix = np.clip(np.searchsorted(gx, x) - 1, 0, gx.size - 2)
    ip = np.clip(np.searchsorted(gp, p) - 1, 0, gp.size - 2)
    fx = (x - gx[ix]) / (gx[ix + 1] - gx[ix])
    fp = (p - gp[ip]) / (gp[ip + 1] - gp[ip])
    inside = (x >= gx[0]) & (x <= gx[-1]) & (p >= gp[0]) & (p <= gp[-1])
    fx = np.clip(fx, 0.0, 1.0)
    fp = np.clip(fp, 0.0, 1.0)
    out = (v[ip, ix] * (1 - fp) * (1 - fx)
           + v[ip + 1, ix] * fp * (1 - fx)
           + v[ip, ix + 1] * (1 - fp) * fx
           + v[ip + 1, ix + 1] * fp * fx)
    return np.where(inside, out, 0.0)
