"""Run-configuration files.

INI-style sections mirror the parameter groups::

    [system]
    omega_a_mhz = 7000      ; frequencies as value/2pi in MHz
    omega_r_mhz = 5000
    g_mhz = 100
    epsilon_mhz = 1000

    [rates]
    kappa_mhz = 0.0         ; decay rates as value/2pi in MHz
    gamma_1_mhz = 0.02
    gamma_phi_mhz = 0.31

    [walk]
    alpha = 3.0
    d = 21
    n_steps = 15
    pulse_mode = adaptive   ; adaptive | fixed | frequency
    ; tau_us = 0.0441       ; optional override, microseconds

    [numerics]
    n_max = 40
    margin = 0.1
    theta_points = 161

All numeric physics values are converted to internal angular units on load.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .dynamics import DecoherenceRates, StepControl, SystemParams
from .errors import ConfigError
from .hilbert import FockCutoff
from .protocol import WalkConfig
from . import units

__all__ = ["RunSettings", "load_config", "default_config_text"]


@dataclass(frozen=True)
class RunSettings:
    """Everything a CLI run needs: physics config plus numerical knobs."""

    walk: WalkConfig
    control: StepControl
    theta_points: int
    qp_phi_mode: str  # "transverse" or a float-in-string LO phase


def default_config_text() -> str:
    return (
        "[system]\n"
        "omega_a_mhz = 7000\n"
        "omega_r_mhz = 5000\n"
        "g_mhz = 100\n"
        "epsilon_mhz = 1000\n"
        "\n"
        "[rates]\n"
        "kappa_mhz = 0.0\n"
        "gamma_1_mhz = 0.02\n"
        "gamma_phi_mhz = 0.31\n"
        "\n"
        "[walk]\n"
        "alpha = 3.0\n"
        "d = 21\n"
        "n_steps = 15\n"
        "pulse_mode = adaptive\n"
        "\n"
        "[numerics]\n"
        "n_max = 40\n"
        "margin = 0.1\n"
        "theta_points = 161\n"
    )


def _get(section, key, cast, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key '{key}' in [{section.name}]")
        return default
    try:
        return cast(section[key])
    except ValueError as exc:
        raise ConfigError(f"bad value for '{key}' in [{section.name}]: {exc}") from exc


def load_config(path: str | Path) -> RunSettings:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    for name in ("system", "walk"):
        if name not in parser:
            raise ConfigError(f"missing [{name}] section in {path}")

    system = parser["system"]
    rates_s = parser["rates"] if "rates" in parser else {"name": "rates"}
    walk_s = parser["walk"]
    num = parser["numerics"] if "numerics" in parser else None

    try:
        params = SystemParams.from_mhz(
            omega_a=_get(system, "omega_a_mhz", float, required=True),
            omega_r=_get(system, "omega_r_mhz", float, required=True),
            g=_get(system, "g_mhz", float, required=True),
            epsilon=_get(system, "epsilon_mhz", float, required=True),
        )
    except Exception as exc:
        raise ConfigError(f"invalid [system] parameters: {exc}") from exc

    if "rates" in parser:
        rates = DecoherenceRates(
            kappa=units.rate_from_mhz(_get(rates_s, "kappa_mhz", float, 0.0)),
            gamma_1=units.rate_from_mhz(_get(rates_s, "gamma_1_mhz", float, 0.0)),
            gamma_phi=units.rate_from_mhz(_get(rates_s, "gamma_phi_mhz", float, 0.0)),
            gamma_m=units.rate_from_mhz(_get(rates_s, "gamma_m_mhz", float, 0.0)),
        )
    else:
        rates = DecoherenceRates()

    n_max = _get(num, "n_max", int, 40) if num is not None else 40
    cutoff = FockCutoff(n_max)
    tau = _get(walk_s, "tau_us", float, None)
    try:
        walk = WalkConfig(
            alpha=_get(walk_s, "alpha", float, required=True),
            d=_get(walk_s, "d", int, required=True),
            n_steps=_get(walk_s, "n_steps", int, required=True),
            params=params,
            rates=rates,
            cutoff=cutoff,
            tau=tau,
            pulse_mode=_get(walk_s, "pulse_mode", str, "adaptive"),
        )
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"invalid [walk] parameters: {exc}") from exc

    margin = _get(num, "margin", float, 0.1) if num is not None else 0.1
    theta_points = (_get(num, "theta_points", int, 4 * n_max + 1)
                    if num is not None else 4 * n_max + 1)
    if theta_points < 4 * n_max:
        raise ConfigError(
            f"theta_points = {theta_points} below 4 n_max = {4 * n_max}"
        )
    control = StepControl(margin=margin)
    return RunSettings(
        walk=walk,
        control=control,
        theta_points=theta_points,
        qp_phi_mode="transverse",
    )
