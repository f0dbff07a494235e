"""One-dimensional grid examples: optimal momentum and energy estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..grid import (
    ExactUncertaintyResult,
    Grid1D,
    GridWavefunction,
    energy_optimal_estimate,
    exact_uncertainty_check,
    expectation_on_support,
    momentum_moments,
    momentum_optimal_estimate,
)
from ..operators import InvalidInputError


def gaussian_packet(grid: Grid1D, sigma: float = 1.0, center: float = 0.0, k: float = 0.0, chirp: float = 0.0):
    """Gaussian with position std ``sigma`` and phase ``k x + chirp x^2 / 2``."""
    x = grid.points
    return np.exp(-((x - center) ** 2) / (4 * sigma**2) + 1j * (k * (x - center) + 0.5 * chirp * (x - center) ** 2))


def two_bump(grid: Grid1D, sigma: float = 1.0, separation: float = 4.0, chirp: float = 0.0):
    x = grid.points
    half = separation / 2
    bumps = np.exp(-((x - half) ** 2) / (4 * sigma**2)) + np.exp(-((x + half) ** 2) / (4 * sigma**2))
    return bumps * np.exp(0.5j * chirp * x**2)


@dataclass
class MomentumGridResult:
    uncertainty: ExactUncertaintyResult
    mean_p_opt: float
    mean_p: float
    p_opt: np.ndarray
    grid: Grid1D


def scenario_momentum_grid(shape: str = "gaussian", sigma: float = 1.0, k: float = 0.0, chirp: float = 0.0,
                           separation: float = 4.0, n: int = 1024, half_width: float | None = None,
                           hbar: float = 1.0) -> MomentumGridResult:
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    if half_width is None:
        half_width = 12.0 * sigma + (separation / 2 if shape == "two-bump" else 0.0)
    grid = Grid1D.centered(n, half_width, hbar)
    if shape == "gaussian":
        amps = gaussian_packet(grid, sigma, k=k, chirp=chirp)
    elif shape == "two-bump":
        amps = two_bump(grid, sigma, separation, chirp) * np.exp(1j * k * grid.points)
    else:
        raise InvalidInputError(f"unknown shape {shape!r}")
    psi = GridWavefunction((grid,), amps)
    p_opt = momentum_optimal_estimate(psi)
    mean_p, _ = momentum_moments(psi)
    return MomentumGridResult(
        uncertainty=exact_uncertainty_check(psi),
        mean_p_opt=expectation_on_support(psi, p_opt),
        mean_p=mean_p,
        p_opt=p_opt,
        grid=grid,
    )


@dataclass
class EnergyGridResult:
    e_opt: np.ndarray
    interior: np.ndarray
    target: float
    mean_e_opt: float
    hamiltonian_mean: float

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.e_opt[self.interior] - self.target)))


def harmonic_ground_state(grid: Grid1D, mass: float, omega: float) -> GridWavefunction:
    return GridWavefunction((grid,), np.exp(-mass * omega * grid.points**2 / (2 * grid.hbar)))


def interior_support(values: np.ndarray, margin: int = 2) -> np.ndarray:
    """Finite points at least ``margin`` samples away from any non-finite point."""
    ok = np.isfinite(values)
    out = ok.copy()
    for s in range(1, margin + 1):
        out[s:] &= ok[:-s]
        out[:-s] &= ok[s:]
    out[:margin] = out[-margin:] = False
    return out


def scenario_energy_grid(mass: float = 1.0, omega: float = 1.0, n: int = 1024, half_width: float | None = None,
                         hbar: float = 1.0) -> EnergyGridResult:
    if not (mass > 0 and omega > 0):
        raise InvalidInputError("mass and omega must be positive")
    width = np.sqrt(hbar / (2 * mass * omega))
    grid = Grid1D.centered(n, half_width or 12.0 * width, hbar)
    psi = harmonic_ground_state(grid, mass, omega)
    V = 0.5 * mass * omega**2 * grid.points**2
    e_opt = energy_optimal_estimate(psi, V, mass)
    _, p2 = momentum_moments(psi)
    return EnergyGridResult(
        e_opt=e_opt,
        interior=interior_support(e_opt),
        target=0.5 * hbar * omega,
        mean_e_opt=expectation_on_support(psi, e_opt),
        hamiltonian_mean=p2 / (2 * mass) + float(np.sum(psi.density() * V) * grid.dx),
    )
