"""CSV and JSON emission helpers shared by the CLI.

All CSV values carry 12 significant digits so downstream regressions
reproduce bit-for-bit from the files.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import numpy as np

from .analysis import RegressionRow

__all__ = [
    "fmt",
    "write_csv",
    "write_series_csv",
    "write_distribution_csv",
    "write_matrix_csv",
    "write_table_csv",
    "ManifestWriter",
]


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_series_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    rows = zip(*arrays)
    write_csv(path, names, rows)


def write_distribution_csv(path: Path, grid_name: str, grid: np.ndarray,
                           values: np.ndarray) -> None:
    write_csv(path, [grid_name, "value"], zip(grid, values))


def write_matrix_csv(path: Path, x: np.ndarray, p: np.ndarray,
                     values: np.ndarray) -> None:
    """Matrix with x-axis header row and p-axis first column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p\\x"] + [fmt(v) for v in x])
        for i, pv in enumerate(p):
            writer.writerow([fmt(pv)] + [fmt(v) for v in values[i]])


TABLE_HEADER = ["kappa_over_2pi_MHz", "s", "ds", "ln_sigma0", "d_ln_sigma0", "r"]


def write_table_csv(path: Path, rows: list[RegressionRow]) -> None:
    write_csv(
        path,
        TABLE_HEADER,
        ((r.kappa, r.s, r.ds, r.intercept, r.d_intercept, r.r) for r in rows),
    )


def read_series_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = {name: [] for name in header}
        for row in reader:
            for name, val in zip(header, row):
                cols[name].append(float(val))
    return {k: np.asarray(v) for k, v in cols.items()}


class ManifestWriter:
    """Collects run provenance; the manifest file is always written last."""

    def __init__(self, out_dir: Path, command: str, config_echo: dict,
                 seed: int | None = None):
        self.out_dir = Path(out_dir)
        self.command = command
        self.config_echo = config_echo
        self.seed = seed
        self.files: list[str] = []
        self.errors: list[str] = []
        self.notes: list[str] = []
        self._t0 = time.monotonic()

    def register(self, path: Path) -> Path:
        rel = Path(path).relative_to(self.out_dir)
        self.files.append(str(rel))
        return Path(path)

    def record_error(self, message: str) -> None:
        self.errors.append(message)

    def note(self, message: str) -> None:
        self.notes.append(message)

    def finalize(self) -> Path:
        from . import __version__

        payload = {
            "command": self.command,
            "version": _describe_version(__version__),
            "seed": self.seed,
            "config": self.config_echo,
            "duration_seconds": round(time.monotonic() - self._t0, 3),
            "outputs": sorted(self.files),
            "errors": self.errors,
            "notes": self.notes,
        }
        path = self.out_dir / "manifest.json"
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _describe_version(fallback: str) -> str:
    import subprocess

    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).parent,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{fallback}+{out.stdout.strip()}"
    except Exception:
        pass
    return fallback
