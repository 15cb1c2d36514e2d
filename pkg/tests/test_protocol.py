import math

import numpy as np
import pytest

from quincunx.dynamics import (
    DecoherenceRates,
    DriveSegment,
    StepControl,
    SystemParams,
    evolve,
)
from quincunx.errors import NonPositiveDurationError, WalkBoundWarning
from quincunx.hilbert import FockCutoff, check_density, prepare_initial_joint
from quincunx.protocol import (
    WalkConfig,
    build_schedule,
    drive_frequency,
    hadamard_duration,
    precompute_photon_trajectory,
    run_walk,
    step_angle,
    tau_for_step_angle,
    validate_config,
)

PAPER = SystemParams.from_mhz(7000, 5000, 100, 1000)
SMALL = WalkConfig(
    alpha=1.2, d=5, n_steps=3,
    params=PAPER,
    rates=DecoherenceRates(kappa=0.3, gamma_1=0.02, gamma_phi=0.31),
    cutoff=FockCutoff(12),
)
FAST = StepControl(margin=0.25)


def paper_config(**overrides):
    base = dict(alpha=3.0, d=21, n_steps=15, params=PAPER,
                rates=DecoherenceRates(gamma_1=0.02, gamma_phi=0.31),
                cutoff=FockCutoff(40))
    base.update(overrides)
    return WalkConfig(**base)


def test_validate_config_reference_point():
    report = validate_config(paper_config())
    by_name = {c.name: c for c in report.checks}
    assert by_name["d_lower_bound"].passed          # 12 < 21
    assert not by_name["d_upper_bound"].passed      # 21 > 18.85
    assert by_name["d_upper_bound"].severity == "warning"
    assert "18.85" in by_name["d_upper_bound"].detail
    assert by_name["critical_photon_number"].passed  # 9 < 100
    assert "100" in by_name["critical_photon_number"].detail
    assert by_name["step_bound"].passed              # 15 < 18.85
    assert not report.hard_failures


def test_validate_config_hard_failure():
    report = validate_config(paper_config(d=5))
    assert any(c.name == "d_lower_bound" for c in report.hard_failures)


def test_hadamard_duration_anchor():
    t_h = hadamard_duration(9.0, PAPER)
    assert abs(t_h - 0.01567) / 0.01567 < 0.01


def test_hadamard_duration_affine_in_nbar():
    # slope pi * chi / (2 g eps) in the calibrated (cyclic) evaluation
    chi, g, eps = 5.0, 100.0, 1000.0
    expected_slope = math.pi * chi / (2 * g * eps)
    d1 = hadamard_duration(4.0, PAPER)
    d2 = hadamard_duration(10.0, PAPER)
    assert (d2 - d1) / 6.0 == pytest.approx(expected_slope, rel=1e-12)


def test_hadamard_duration_matches_generic_rabi_pulse():
    # pi / (2 Omega_R) with Omega_R evaluated in the same calibrated units
    omega_d = drive_frequency(9.0, PAPER)
    rabi = 2 * 100.0 * 1000.0 / (omega_d - 5000.0)
    generic = math.pi / (2 * rabi)
    assert abs(generic - hadamard_duration(9.0, PAPER)) / generic < 0.05


def test_hadamard_duration_guards():
    with pytest.raises(ValueError):
        hadamard_duration(-1.0, PAPER)
    pathological = SystemParams(omega_a=7000, omega_r=5000, g=100,
                                epsilon=50000)
    with pytest.raises(NonPositiveDurationError):
        hadamard_duration(0.0, pathological)


def test_drive_frequency_values():
    assert drive_frequency(9.0, PAPER) == pytest.approx(6990.0)
    no_coupling = SystemParams(omega_a=7000, omega_r=5000, g=0.0,
                               epsilon=1000)
    assert drive_frequency(5.0, no_coupling) == pytest.approx(7000.0)
    # linear in nbar with slope 2 chi
    d1, d2 = drive_frequency(3.0, PAPER), drive_frequency(4.0, PAPER)
    assert d2 - d1 == pytest.approx(2 * 5.0)


def test_step_angle_structure():
    derived = PAPER.derived(drive_frequency(9.0, PAPER))
    t_h = hadamard_duration(9.0, PAPER)
    theta = step_angle(t_h, 0.03, derived)
    assert theta == pytest.approx(5.0 * (t_h + 0.03))
    assert step_angle(2 * t_h, 0.06, derived) == pytest.approx(2 * theta)
    no_coupling = SystemParams(omega_a=7000, omega_r=5000, g=1e-6,
                               epsilon=1000)
    derived0 = no_coupling.derived(7000.0)
    assert step_angle(t_h, 0.03, derived0) < 1e-12


def test_tau_solves_lattice_registration():
    config = paper_config()
    tau = config.resolved_tau()
    assert tau > 0
    derived = PAPER.derived(drive_frequency(9.0, PAPER))
    t_h = hadamard_duration(9.0, PAPER)
    assert step_angle(t_h, tau, derived) == pytest.approx(2 * math.pi / 21)
    assert tau == pytest.approx(0.044132, abs=1e-5)
    with pytest.raises(NonPositiveDurationError):
        tau_for_step_angle(1e-5, t_h, derived)


def test_photon_number_conserved_without_drive():
    # no drive segments: n is a constant of motion
    cut = FockCutoff(12)
    psi = prepare_initial_joint(1.2, cut)
    segs = [DriveSegment(0.02, False)] * 4
    res = evolve(psi, segs, PAPER, DecoherenceRates(), cut,
                 control=StepControl(record_dense=True))
    assert np.max(np.abs(res.dense_nbar - res.dense_nbar[0])) < 1e-8


def test_precompute_stays_near_initial_circle():
    config = paper_config()
    traj = precompute_photon_trajectory(config, control=FAST)
    nb = np.asarray(traj.nbar_steps)
    assert nb.shape == (15,)
    # the walker wanders between circles but stays within ~sqrt(nbar) of 9
    assert np.all(np.abs(nb - 9.0) < 2 * 3.0)
    # dense curve oscillates during pulses: spread during first pulse window
    t_h0 = hadamard_duration(9.0, config.params)
    pulse_mask = traj.times <= t_h0
    assert traj.nbar[pulse_mask].max() - traj.nbar[pulse_mask].min() > 0.1


def test_schedule_fixed_mode_totals():
    config = paper_config(pulse_mode="fixed")
    sched = build_schedule(config)
    t_h0 = hadamard_duration(9.0, config.params)
    tau = config.resolved_tau()
    assert all(s.t_h == t_h0 for s in sched.steps)
    assert all(s.omega_d == drive_frequency(9.0, config.params)
               for s in sched.steps)
    assert sched.total_duration == pytest.approx(15 * (t_h0 + tau), abs=1e-14)


def test_schedule_adaptive_recomputes_from_trajectory():
    config = paper_config(n_steps=4)
    traj = precompute_photon_trajectory(config, control=FAST)
    sched = build_schedule(config, traj)
    expected_nbars = (9.0,) + traj.nbar_steps[:3]
    assert sched.n_bar_sequence == expected_nbars
    for step, nb in zip(sched.steps, expected_nbars):
        assert step.t_h == hadamard_duration(nb, config.params)
        assert step.omega_d == drive_frequency(nb, config.params)


def test_schedule_frequency_mode():
    config = paper_config(n_steps=4, pulse_mode="frequency")
    traj = precompute_photon_trajectory(config, control=FAST)
    sched = build_schedule(config, traj)
    t_h0 = hadamard_duration(9.0, config.params)
    assert all(s.t_h == t_h0 for s in sched.steps)
    assert sched.steps[2].omega_d == drive_frequency(traj.nbar_steps[1],
                                                     config.params)


def test_zero_step_walk_returns_initial():
    config = paper_config(n_steps=0)
    result = run_walk(config)
    assert len(result.densities) == 1
    psi = prepare_initial_joint(3.0, config.cutoff)
    assert np.max(np.abs(result.densities[0] - np.outer(psi, psi.conj()))) \
        < 1e-14


def test_walk_emits_bound_warnings():
    with pytest.warns(WalkBoundWarning):
        run_walk(paper_config(n_steps=0))


def test_walk_snapshots_are_valid_densities():
    result = run_walk(SMALL)  # default step control
    assert len(result.densities) == SMALL.n_steps + 1
    for rho in result.densities:
        check_density(rho, herm_tol=1e-10, trace_tol=1e-8, eig_tol=-1e-6)
    assert result.max_trace_drift <= 1e-8


def test_walk_determinism_bit_identical():
    r1 = run_walk(SMALL, control=FAST)
    r2 = run_walk(SMALL, control=FAST)
    for a, b in zip(r1.densities, r2.densities):
        assert np.array_equal(a, b)
    assert r1.times == r2.times


def test_dephasing_smears_while_loss_suppresses():
    """Pure qubit dephasing reshapes and smears P(theta); photon loss
    suppresses the spreading instead.

    The driven coin gate is a rotation (not a reflection), so the walk
    carries intrinsic chirality and the dephasing signature is a *change*
    of the asymmetry together with extra smearing, rather than skewness
    appearing from zero.
    """
    from quincunx.analysis import walk_series

    base = dict(alpha=2.0, d=10, n_steps=5, params=PAPER,
                cutoff=FockCutoff(25), tau=None)
    plain = walk_series(run_walk(WalkConfig(rates=DecoherenceRates(), **base),
                                 control=FAST))
    dephased = walk_series(run_walk(
        WalkConfig(rates=DecoherenceRates(gamma_phi=1.5), **base),
        control=FAST))
    lossy = walk_series(run_walk(
        WalkConfig(rates=DecoherenceRates(kappa=1.5), **base), control=FAST))
    assert abs(dephased.skewness[-1] - plain.skewness[-1]) > 0.2
    assert dephased.sigma_h[-1] > plain.sigma_h[-1]
    assert lossy.sigma_h[-1] < 0.6 * plain.sigma_h[-1]
