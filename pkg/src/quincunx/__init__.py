"""Quantum quincunx on phase-space circles in driven circuit QED."""

from .hilbert import (
    FockCutoff,
    OperatorSet,
    coherent_state,
    density_from_state,
    partial_trace_coin,
    partial_trace_walker,
    prepare_initial_joint,
)
from .dynamics import (
    DecoherenceRates,
    DerivedParams,
    DriveSegment,
    StepControl,
    SystemParams,
    build_effective_hamiltonian,
    build_lab_hamiltonian,
    classical_cavity_field,
    evolve,
    lindblad_rhs,
    measurement_backaction,
)
from .observables import (
    AngularDistribution,
    PhotonStats,
    QuadratureDistribution,
    WignerGrid,
    analytic_delta_n,
    holevo_std,
    phase_distribution,
    photon_stats,
    quadrature_distribution,
    wigner,
)
from .protocol import (
    PulseSchedule,
    WalkConfig,
    WalkResult,
    build_schedule,
    drive_frequency,
    hadamard_duration,
    precompute_photon_trajectory,
    run_walk,
    step_angle,
    validate_config,
)
from .analysis import (
    RegressionRow,
    SigmaSeries,
    fixed_vs_adaptive_report,
    loglog_regression,
    sweep_kappa,
    walk_series,
)
from .tomography import HomodyneRecord, reconstruct, simulate_homodyne

__version__ = "0.1.0"
