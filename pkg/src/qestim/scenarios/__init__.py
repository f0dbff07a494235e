"""Worked examples assembled from the estimation engine and grid tools."""

from .continuum import scenario_energy_grid, scenario_momentum_grid
from .epr import EprConfig, scenario_epr
from .heterodyne import ConfigError, HeterodyneConfig, scenario_heterodyne
from .qubit import scenario_qubit, scenario_unbiased_joint, unbiased_state_sweep

__all__ = [
    "ConfigError",
    "EprConfig",
    "HeterodyneConfig",
    "scenario_energy_grid",
    "scenario_epr",
    "scenario_heterodyne",
    "scenario_momentum_grid",
    "scenario_qubit",
    "scenario_unbiased_joint",
    "unbiased_state_sweep",
]
