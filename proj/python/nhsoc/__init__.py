"""Driven non-Hermitian two-band simulator.

Thin wrapper over the compiled ``_core`` module. Control points may be
given as ``ControlPoint(q, g)`` or plain ``(q, g)`` tuples.
"""

import os
import shutil
from pathlib import Path as _FsPath

from ._core import (
    BandCoefficients,
    ConfigError,
    ControlPoint,
    Eigensystem,
    Model,
    NhsocError,
    Path,
    ProtocolParams,
    adiabatic_b_approx,
    adiabatic_b_exact,
    band_index,
    eigensystem,
    evolve,
    half_gap,
    hamiltonian,
    log_spaced_speeds,
    point_source_diagram,
    predict_nat_radius,
    predicted_min_height,
    project,
    protocol_phase_diagram,
    run_experiment,
    speed_sweep,
    spin_polarization,
    standard_path,
)

__version__ = "0.1.0"


def cli_path():
    """Location of the ``nhsoc`` command-line tool, or None."""
    env = os.environ.get("NHSOC_CLI")
    if env:
        return env
    bundled = _FsPath(__file__).parent / "bin" / "nhsoc"
    if bundled.exists():
        return str(bundled)
    return shutil.which("nhsoc")


__all__ = [
    "BandCoefficients",
    "ConfigError",
    "ControlPoint",
    "Eigensystem",
    "Model",
    "NhsocError",
    "Path",
    "ProtocolParams",
    "adiabatic_b_approx",
    "adiabatic_b_exact",
    "band_index",
    "cli_path",
    "eigensystem",
    "evolve",
    "half_gap",
    "hamiltonian",
    "log_spaced_speeds",
    "point_source_diagram",
    "predict_nat_radius",
    "predicted_min_height",
    "project",
    "protocol_phase_diagram",
    "run_experiment",
    "speed_sweep",
    "spin_polarization",
    "standard_path",
]
