"""Volume-preserving Allen-Cahn solver on the periodic unit cube."""

from ._vpac import (
    BlowupError,
    ConfigError,
    build_phi0,
    compute_record,
    discrepancy,
    energies,
    integrate,
    k_mass,
    laplacian,
    read_snapshot,
    rhs,
    run,
    run_scenario,
    scenario_document,
    scenario_names,
    sigma,
    stable_dt,
    validate_config,
)

__all__ = [
    "BlowupError",
    "ConfigError",
    "build_phi0",
    "compute_record",
    "discrepancy",
    "energies",
    "integrate",
    "k_mass",
    "laplacian",
    "read_snapshot",
    "rhs",
    "run",
    "run_scenario",
    "scenario_document",
    "scenario_names",
    "sigma",
    "stable_dt",
    "validate_config",
]
