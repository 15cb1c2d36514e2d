import math

import numpy as np
import pytest

from quincunx.errors import DeconvolutionWarning, InsufficientAnglesError
from quincunx.hilbert import FockCutoff, coherent_state
from quincunx.observables import (
    holevo_std,
    phase_distribution,
    quadrature_distribution,
)
from quincunx.tomography import reconstruct, simulate_homodyne

CUT = FockCutoff(40)
ANGLES_24 = np.linspace(0.0, math.pi, 24, endpoint=False)


def coherent_density(alpha, cut=CUT):
    v = coherent_state(alpha, cut)
    return np.outer(v, v.conj())


def vacuum_density(cut=CUT):
    rho = np.zeros((cut.walker_dim, cut.walker_dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def records_for(rho, n_thermal, shots=100000, seed0=100,
                angles=ANGLES_24):
    return [simulate_homodyne(rho, phi, shots, n_thermal, seed=seed0 + i)
            for i, phi in enumerate(angles)]


def test_noiseless_vacuum_sample_variance():
    rec = simulate_homodyne(vacuum_density(), 0.3, 100000, 0.0, seed=5)
    # Var = 1/2; SE of the sample variance ~ var * sqrt(2/n)
    se = 0.5 * math.sqrt(2.0 / 100000)
    assert abs(np.var(rec.samples) - 0.5) < 3 * se
    assert abs(np.mean(rec.samples)) < 3 * math.sqrt(0.5 / 100000)


def test_thermal_vacuum_sample_variance():
    rec = simulate_homodyne(vacuum_density(), 0.0, 100000, 20.0, seed=6)
    se = 20.5 * math.sqrt(2.0 / 100000)
    assert abs(np.var(rec.samples) - 20.5) < 3 * se


def test_thermal_coherent_mean_preserved():
    rec = simulate_homodyne(coherent_density(3.0), 0.0, 100000, 20.0, seed=7)
    se = math.sqrt(20.5 / 100000)
    assert abs(np.mean(rec.samples) - math.sqrt(2.0) * 3.0) < 4 * se


def test_seeded_determinism():
    a = simulate_homodyne(coherent_density(2.0), 0.4, 5000, 5.0, seed=42)
    b = simulate_homodyne(coherent_density(2.0), 0.4, 5000, 5.0, seed=42)
    assert np.array_equal(a.samples, b.samples)
    c = simulate_homodyne(coherent_density(2.0), 0.4, 5000, 5.0, seed=43)
    assert not np.array_equal(a.samples, c.samples)


def test_histogram_converges_to_quadrature_distribution():
    rho = coherent_density(2.0)
    rec = simulate_homodyne(rho, 0.7, 100000, 0.0, seed=11)
    edges = np.linspace(-9, 9, 121)
    counts, _ = np.histogram(rec.samples, bins=edges)
    empirical = counts / counts.sum()
    centers = (edges[:-1] + edges[1:]) / 2
    exact = quadrature_distribution(rho, 0.7, np.linspace(-9, 9, 1001))
    expected = np.interp(centers, exact.x, exact.values)
    expected = expected / expected.sum()
    tv = 0.5 * np.abs(empirical - expected).sum()
    assert tv <= 0.03


def test_reconstruct_requires_enough_angles():
    rho = vacuum_density()
    recs = records_for(rho, 0.0, shots=2000,
                       angles=np.linspace(0, math.pi, 4, endpoint=False))
    grid = np.linspace(-5, 5, 41)
    with pytest.raises(InsufficientAnglesError):
        reconstruct(recs, grid, grid)
    # angles clustered in half the range are rejected too
    recs = records_for(rho, 0.0, shots=2000,
                       angles=np.linspace(0, math.pi / 3, 12, endpoint=False))
    with pytest.raises(InsufficientAnglesError):
        reconstruct(recs, grid, grid)


def test_reconstruct_vacuum_wigner_peak():
    recs = records_for(vacuum_density(), 0.0, seed0=1000)
    grid = np.linspace(-6, 6, 121)
    result = reconstruct(recs, grid, grid)
    i0 = np.argmin(np.abs(grid))
    assert abs(result.wigner.values[i0, i0] - 1 / math.pi) / (1 / math.pi) < 0.10
    assert abs(result.wigner.integral() - 1.0) < 0.05


def test_reconstruct_thermal_coherent_peak_location():
    recs = records_for(coherent_density(3.0), 20.0, seed0=2000)
    grid = np.linspace(-9, 9, 151)
    result = reconstruct(recs, grid, grid)
    ip, ix = np.unravel_index(np.argmax(result.wigner.values),
                              result.wigner.values.shape)
    assert abs(grid[ix] - math.sqrt(2.0) * 3.0) <= 0.2
    assert abs(grid[ip]) <= 0.2


def test_filter_is_noop_without_thermal_noise():
    recs = records_for(vacuum_density(), 0.0, shots=20000, seed0=3000)
    grid = np.linspace(-5, 5, 61)
    with_default = reconstruct(recs, grid, grid)
    unfiltered = reconstruct(recs, grid, grid, filter_cutoff=math.inf)
    assert np.max(np.abs(with_default.wigner.values
                         - unfiltered.wigner.values)) < 1e-6


def test_deconvolution_amplification_warning():
    recs = records_for(vacuum_density(), 5.0, shots=5000, seed0=4000)
    grid = np.linspace(-5, 5, 41)
    with pytest.warns(DeconvolutionWarning):
        reconstruct(recs, grid, grid, filter_cutoff=2.5)


def test_spread_state_phase_reconstruction():
    """End-to-end phase spread from noisy tomography of a walk-like state."""
    rng = np.random.default_rng(3)
    cut = FockCutoff(40)
    rho = np.zeros((41, 41), dtype=complex)
    for angle, weight in [(-1.35, 0.18), (-0.9, 0.12), (-0.45, 0.1),
                          (0.0, 0.2), (0.45, 0.1), (0.9, 0.12),
                          (1.35, 0.18)]:
        v = coherent_state(3.0 * np.exp(1j * angle), cut)
        rho += weight * np.outer(v, v.conj())
    rho /= np.trace(rho).real
    exact = holevo_std(phase_distribution(rho, 161))
    recs = records_for(rho, 20.0, seed0=5000)
    grid = np.linspace(-9, 9, 151)
    result = reconstruct(recs, grid, grid)
    got = holevo_std(result.phase_dist)
    assert abs(got - exact) / exact < 0.15
