"""Command-line interface.

Subcommands::

    quincunx simulate   -c config.ini -o outdir
    quincunx sweep      -c config.ini -o outdir --kappa 0,0.05,0.1,0.3,0.5
    quincunx reference  --model ideal_qw -o outdir --d 21 --steps 9
    quincunx tomography -c config.ini -o outdir --shots 100000 --angles 24
    quincunx regress    --input sigma_h.csv --x time --y sigma

Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.
All artifacts are UTF-8 CSV/JSON; a manifest.json listing every emitted file
is always written last.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import analysis, config, io, reference, tomography
from .errors import ConfigError, QuincunxError
from .hilbert import FockCutoff, coherent_state, partial_trace_coin
from .observables import (
    circular_rms_std,
    holevo_std,
    phase_distribution,
    photon_stats,
    wigner,
)
from .protocol import run_walk, validate_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _parse_kappa_list(text: str) -> list[float]:
    values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    if not values:
        raise ConfigError("empty kappa list")
    unique = sorted(set(values))
    if len(unique) != len(values):
        warnings.warn("duplicate kappa values removed", UserWarning)
    return unique


def _emit_walk_outputs(out: Path, manifest: io.ManifestWriter,
                       series: analysis.WalkSeries, result,
                       theta_points: int) -> None:
    steps = np.arange(series.times.size)
    io.write_series_csv(manifest.register(out / "sigma_h.csv"), {
        "step": steps, "time_us": series.times, "sigma_h": series.sigma_h,
    })
    io.write_series_csv(manifest.register(out / "sigma_qp.csv"), {
        "step": steps, "time_us": series.times, "sigma_qp": series.sigma_qp,
    })
    io.write_series_csv(manifest.register(out / "nbar.csv"), {
        "step": steps, "time_us": series.times, "nbar": series.nbar,
        "delta_n": series.delta_n,
    })
    cutoff = result.config.cutoff
    pn_rows = {"n": np.arange(cutoff.walker_dim)}
    for j, rho in enumerate(result.densities):
        pn_rows[f"step_{j}"] = photon_stats(
            partial_trace_coin(rho, cutoff)).pn
    io.write_series_csv(manifest.register(out / "pn.csv"), pn_rows)
    for j, rho in enumerate(result.densities):
        dist = phase_distribution(partial_trace_coin(rho, cutoff),
                                  theta_points)
        io.write_distribution_csv(
            manifest.register(out / f"phase_dist_step_{j}.csv"),
            "theta", dist.theta, dist.values,
        )


def cmd_simulate(args) -> int:
    settings = config.load_config(args.config)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest = io.ManifestWriter(out, "simulate",
                                 {"config_path": str(args.config)})
    report = validate_config(settings.walk)
    if report.hard_failures:
        print("configuration failed validation:", file=sys.stderr)
        print(report.format(), file=sys.stderr)
        return EXIT_CONFIG
    for check in report.checks:
        if not check.passed:
            print(f"warning: {check.name}: {check.detail}", file=sys.stderr)
    try:
        result = run_walk(settings.walk, control=settings.control)
        series = analysis.walk_series(result, n_theta=settings.theta_points)
    except QuincunxError as exc:
        manifest.record_error(repr(exc))
        manifest.finalize()
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit_walk_outputs(out, manifest, series, result, settings.theta_points)
    manifest.note(report.format())
    manifest.finalize()
    return EXIT_OK


def cmd_sweep(args) -> int:
    settings = config.load_config(args.config)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    kappas = _parse_kappa_list(args.kappa)
    jobs = args.jobs or int(os.environ.get("QUINCUNX_JOBS", "1"))
    manifest = io.ManifestWriter(out, "sweep", {
        "config_path": str(args.config), "kappa_mhz": kappas, "jobs": jobs,
        "window": list(args.window) if args.window else None,
    })
    report = validate_config(settings.walk)
    if report.hard_failures:
        print(report.format(), file=sys.stderr)
        return EXIT_CONFIG
    window = tuple(args.window) if args.window else None
    entries = analysis.sweep_kappa(
        settings.walk, kappas, control=settings.control,
        window=window, jobs=jobs,
    )
    rows_h, rows_qp = [], []
    for entry in entries:
        if entry.error is not None:
            manifest.record_error(f"kappa={entry.kappa_mhz}: {entry.error}")
            continue
        rows_h.append(entry.row_h)
        rows_qp.append(entry.row_qp)
        sub = out / f"kappa_{entry.kappa_mhz:g}"
        sub.mkdir(exist_ok=True)
        steps = np.arange(entry.series.times.size)
        saturated = entry.series.saturated()
        io.write_series_csv(manifest.register(sub / "series.csv"), {
            "step": steps,
            "time_us": entry.series.times,
            "sigma_h": entry.series.sigma_h,
            "sigma_qp": entry.series.sigma_qp,
            "nbar": entry.series.nbar,
            "delta_n": entry.series.delta_n,
            "excluded": saturated.astype(int),
        })
    io.write_table_csv(manifest.register(out / "table1.csv"), rows_h)
    io.write_table_csv(manifest.register(out / "table2.csv"), rows_qp)
    manifest.finalize()
    return EXIT_OK if not manifest.errors else EXIT_NUMERICAL


def cmd_reference(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest = io.ManifestWriter(out, "reference", {
        "model": args.model, "d": args.d, "steps": args.steps,
        "lattice_angle": args.lattice_angle, "lam": args.lam,
        "alpha": args.alpha,
    })
    steps = np.arange(1, args.steps + 1)
    if args.model == "ideal_qw":
        sig_h = reference.ideal_qw_sigma(args.d, args.steps, kind="holevo")
        sig_r = reference.ideal_qw_sigma(args.d, args.steps, kind="rms")
        io.write_series_csv(manifest.register(out / "sigma.csv"), {
            "step": steps, "sigma_holevo": sig_h, "sigma_rms": sig_r,
        })
        state = reference.initial_cycle_state(args.d)
        for j in range(args.steps):
            state = reference.ideal_qw_step(state)
            dist = reference.site_distribution(state)
            io.write_distribution_csv(
                manifest.register(out / f"dist_step_{j + 1}.csv"),
                "theta", dist.theta, dist.values)
    elif args.model == "classical_rw":
        sig_h = reference.classical_rw_sigma(args.d, args.steps, kind="holevo")
        sig_r = reference.classical_rw_sigma(args.d, args.steps, kind="rms")
        io.write_series_csv(manifest.register(out / "sigma.csv"), {
            "step": steps, "sigma_holevo": sig_h, "sigma_rms": sig_r,
        })
        theta = 2.0 * math.pi * np.arange(args.d) / args.d
        for dist in reference.classical_rw_dist(args.d, args.steps):
            io.write_distribution_csv(
                manifest.register(out / f"dist_step_{dist.step}.csv"),
                "theta", theta, dist.probabilities * args.d / (2 * math.pi))
    elif args.model == "displaced_circle":
        dtheta = args.lattice_angle if args.lattice_angle else 2 * math.pi / args.d
        cutoff = FockCutoff(args.n_max)
        states, stats = reference.displaced_circle_run(
            args.alpha, dtheta, args.lam, args.steps, cutoff)
        sig_h, sig_r = [], []
        for psi in states[1:]:
            rho_w = reference._walker_density(psi, cutoff)
            dist = phase_distribution(rho_w, 4 * args.n_max + 1)
            sig_h.append(holevo_std(dist))
            sig_r.append(circular_rms_std(dist))
        io.write_series_csv(manifest.register(out / "sigma.csv"), {
            "step": steps, "sigma_holevo": sig_h, "sigma_rms": sig_r,
            "nbar": [s.n_bar for s in stats[1:]],
            "delta_n": [s.delta_n for s in stats[1:]],
        })
    else:
        print(f"unknown model {args.model}", file=sys.stderr)
        return EXIT_CONFIG

    for label, values in (("holevo", sig_h), ("rms", sig_r)):
        series = analysis.SigmaSeries(
            label=f"sigma_{label}", times=steps.astype(float),
            values=np.asarray(values))
        try:
            row = analysis.loglog_regression(series)
            io.write_table_csv(
                manifest.register(out / f"regression_{label}.csv"), [row])
        except QuincunxError as exc:
            manifest.record_error(f"{label}: {exc!r}")
    manifest.finalize()
    return EXIT_OK


def cmd_tomography(args) -> int:
    settings = config.load_config(args.config) if args.config else None
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest = io.ManifestWriter(out, "tomography", {
        "config_path": str(args.config) if args.config else None,
        "shots": args.shots, "angles": args.angles,
        "nthermal": args.nthermal, "alpha": args.alpha,
    }, seed=args.seed)
    if args.angles < tomography.MIN_ANGLES:
        print(f"need at least {tomography.MIN_ANGLES} angles",
              file=sys.stderr)
        return EXIT_CONFIG
    n_max = settings.walk.cutoff.n_max if settings else args.n_max
    cutoff = FockCutoff(n_max)
    alpha = settings.walk.alpha if settings else args.alpha
    vec = coherent_state(alpha, cutoff)
    rho_w = np.outer(vec, vec.conj())
    phis = np.linspace(0.0, math.pi, args.angles, endpoint=False)
    records = []
    for i, phi in enumerate(phis):
        rec = tomography.simulate_homodyne(
            rho_w, phi, args.shots, args.nthermal,
            seed=args.seed + i if args.seed is not None else None)
        records.append(rec)
        io.write_series_csv(manifest.register(out / f"record_{i:02d}.csv"), {
            "phi": np.full(rec.samples.size, rec.phi),
            "sample": rec.samples,
        })
    span = math.sqrt(2.0 * alpha * alpha) + 5.0
    grid = np.linspace(-span, span, args.grid_points)
    recon = tomography.reconstruct(records, grid, grid)
    io.write_matrix_csv(manifest.register(out / "wigner_recon.csv"),
                        grid, grid, recon.wigner.values)
    exact = wigner(rho_w, grid, grid)
    io.write_matrix_csv(manifest.register(out / "wigner_exact.csv"),
                        grid, grid, exact.values)
    io.write_distribution_csv(manifest.register(out / "phase_dist_recon.csv"),
                              "theta", recon.phase_dist.theta,
                              recon.phase_dist.values)
    ix = np.unravel_index(np.argmax(recon.wigner.values),
                          recon.wigner.values.shape)
    exact_dist = phase_distribution(rho_w, 4 * n_max + 1)
    diag_rows = {
        "peak_x": [grid[ix[1]]],
        "peak_p": [grid[ix[0]]],
        "expected_x": [math.sqrt(2.0) * alpha],
        "expected_p": [0.0],
        "sigma_h_reconstructed": [holevo_std(recon.phase_dist)],
        "sigma_h_exact": [holevo_std(exact_dist)],
        "w00_exact": [float(exact.values[ix[0], ix[1]])],
        "cutoff_frequency": [recon.cutoff_frequency],
        "amplification": [recon.amplification],
        "bins": [recon.bins],
    }
    io.write_series_csv(manifest.register(out / "diagnostics.csv"), diag_rows)
    manifest.finalize()
    return EXIT_OK


def cmd_regress(args) -> int:
    path = Path(args.input)
    if not path.exists():
        print(f"input not found: {path}", file=sys.stderr)
        return EXIT_CONFIG
    cols = io.read_series_csv(path)
    if args.x not in cols or args.y not in cols:
        print(f"columns {args.x!r}/{args.y!r} not in {list(cols)}",
              file=sys.stderr)
        return EXIT_CONFIG
    series = analysis.SigmaSeries(label=args.y, times=cols[args.x],
                                  values=cols[args.y])
    window = tuple(args.window) if args.window else None
    try:
        row = analysis.loglog_regression(series.windowed(window))
    except QuincunxError as exc:
        print(f"regression failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = Path(args.output) if args.output else path.parent
    out.mkdir(parents=True, exist_ok=True)
    io.write_table_csv(out / "regression.csv", [row])
    slopes = analysis.local_slopes(series)
    breakdown = analysis.breakdown_step(series)
    io.write_series_csv(out / "local_slopes.csv", {
        "step": np.arange(1, series.values.size + 1),
        "local_slope": slopes,
        "breakdown": [1 if breakdown is not None and s + 1 == breakdown
                      else 0 for s in range(series.values.size)],
    })
    print(f"s = {row.s:.6f} +- {row.ds:.6f}   intercept = "
          f"{row.intercept:.6f} +- {row.d_intercept:.6f}   r = {row.r:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quincunx",
        description="Coined quantum walk on phase-space circles in driven "
                    "circuit QED, with tunable decoherence.",
        epilog="CSV schemas: sigma_h.csv/sigma_qp.csv (step, time_us, value); "
               "nbar.csv (step, time_us, nbar, delta_n); pn.csv (n, one "
               "column per step); phase_dist_step_j.csv (theta, value); "
               "table1.csv/table2.csv "
               "(kappa_over_2pi_MHz, s, ds, ln_sigma0, d_ln_sigma0, r).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one walk, emit observables")
    sim.add_argument("-c", "--config", required=True)
    sim.add_argument("-o", "--output", required=True)
    sim.set_defaults(func=cmd_simulate)

    swp = sub.add_parser("sweep", help="kappa sweep producing tables 1 and 2")
    swp.add_argument("-c", "--config", required=True)
    swp.add_argument("-o", "--output", required=True)
    swp.add_argument("--kappa", required=True,
                     help="comma-separated kappa/2pi values in MHz")
    swp.add_argument("--jobs", type=int, default=None,
                     help="parallel runs (default: QUINCUNX_JOBS or 1)")
    swp.add_argument("--window", type=int, nargs=2, default=None,
                     metavar=("LO", "HI"),
                     help="1-based step window for the regressions")
    swp.set_defaults(func=cmd_sweep)

    ref = sub.add_parser("reference", help="brute-force reference walks")
    ref.add_argument("--model", required=True,
                     choices=["ideal_qw", "classical_rw", "displaced_circle"])
    ref.add_argument("-o", "--output", required=True)
    ref.add_argument("--d", type=int, default=21)
    ref.add_argument("--steps", type=int, default=9)
    ref.add_argument("--alpha", type=float, default=3.0)
    ref.add_argument("--lam", type=float, default=0.0)
    ref.add_argument("--lattice-angle", type=float, default=None)
    ref.add_argument("--n-max", type=int, default=40)
    ref.set_defaults(func=cmd_reference)

    tom = sub.add_parser("tomography", help="homodyne records + reconstruction")
    tom.add_argument("-c", "--config", default=None)
    tom.add_argument("-o", "--output", required=True)
    tom.add_argument("--shots", type=int, default=100000)
    tom.add_argument("--angles", type=int, default=24)
    tom.add_argument("--nthermal", type=float, default=20.0)
    tom.add_argument("--seed", type=int, default=None)
    tom.add_argument("--alpha", type=float, default=3.0)
    tom.add_argument("--n-max", type=int, default=40)
    tom.add_argument("--grid-points", type=int, default=121)
    tom.set_defaults(func=cmd_tomography)

    reg = sub.add_parser("regress", help="log-log regression of a series CSV")
    reg.add_argument("--input", required=True)
    reg.add_argument("--x", default="time_us")
    reg.add_argument("--y", default="sigma_h")
    reg.add_argument("--window", type=int, nargs=2, default=None)
    reg.add_argument("-o", "--output", default=None)
    reg.set_defaults(func=cmd_regress)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuincunxError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
