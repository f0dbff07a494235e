"""Heterodyne detection: joint estimates of both quadratures of one mode.

The measurement is the coherent-state POM ``M_alpha = |alpha><alpha| d^2alpha / pi``
sampled on a square phase-space grid and restricted to a truncated Fock space.
Quadratures follow the convention ``X = (a + a^dag)/2``, ``Y = (a - a^dag)/2i``,
so the vacuum has ``Var X = 1/4`` (other texts differ by a factor sqrt 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh
from scipy.special import gammaln

from ..estimation import EstimateReport, outcome_moments
from ..operators import DensityOperator, HermitianOperator, InvalidInputError, ProbOperatorMeasure

TRUNCATION_NORM_TOL = 1e-8
OCCUPIED_POPULATION = 1.0 - 1e-10
COMPLETENESS_GAP_TOL = 1e-3
Q_FLOOR = 1e-300
Q_REGION = 1e-6


class ConfigError(InvalidInputError):
    """Scenario configuration violates its invariants."""


@dataclass(frozen=True)
class HeterodyneConfig:
    """``state`` is one of ``coherent`` (uses ``beta``), ``squeezed`` (``r``, ``phi``),
    ``fock`` (``photons``) or ``custom`` (``amplitudes`` in the Fock basis)."""

    state: str = "coherent"
    beta: complex = 1.0 + 0.5j
    r: float = 0.0
    phi: float = 0.0
    photons: int = 0
    amplitudes: tuple = ()
    fock_dim: int = 32
    grid_n: int = 64
    grid_radius: float | None = None

    def radius(self, occupied: int) -> float:
        """Explicit ``grid_radius``, else wide enough for the beta offset and the occupied Fock levels."""
        if self.grid_radius is not None:
            return float(self.grid_radius)
        shift = abs(self.beta) if self.state == "coherent" else 0.0
        return max(shift, np.sqrt(occupied)) + 5.0


def coherent_amplitudes(alpha, fock_dim: int) -> np.ndarray:
    """``<n|alpha>`` for ``n < fock_dim``; shape ``alpha.shape + (fock_dim,)``.

    Uses log-factorials so large cutoffs do not overflow.
    """
    alpha = np.asarray(alpha, dtype=np.complex128)
    n = np.arange(fock_dim)
    mod = np.abs(alpha)[..., None]
    safe = np.where(mod > 0, mod, 1.0)
    log_mag = -0.5 * mod**2 + n * np.log(safe) - 0.5 * gammaln(n + 1)
    log_mag = np.where((mod == 0) & (n > 0), -np.inf, log_mag)
    phase = np.exp(1j * n * np.angle(alpha)[..., None])
    return np.exp(log_mag) * phase


def squeezed_vacuum_amplitudes(r: float, phi: float, fock_dim: int) -> np.ndarray:
    out = np.zeros(fock_dim, dtype=np.complex128)
    k = np.arange(0, (fock_dim + 1) // 2)
    t = -np.exp(1j * phi) * np.tanh(r)
    log_coef = 0.5 * gammaln(2 * k + 1) - gammaln(k + 1) - k * np.log(2.0)
    out[2 * k] = np.exp(log_coef) * t**k / np.sqrt(np.cosh(r))
    return out


def state_amplitudes(cfg: HeterodyneConfig) -> np.ndarray:
    N = cfg.fock_dim
    if cfg.state == "coherent":
        return coherent_amplitudes(complex(cfg.beta), N)
    if cfg.state == "squeezed":
        return squeezed_vacuum_amplitudes(cfg.r, cfg.phi, N)
    if cfg.state == "fock":
        if not 0 <= cfg.photons < N:
            raise ConfigError(f"Fock state |{cfg.photons}> does not fit in {N} levels")
        v = np.zeros(N, dtype=np.complex128)
        v[cfg.photons] = 1.0
        return v
    if cfg.state == "custom":
        v = np.zeros(N, dtype=np.complex128)
        amps = np.asarray(cfg.amplitudes, dtype=np.complex128)
        if amps.size == 0 or amps.size > N:
            raise ConfigError("custom amplitudes must be non-empty and fit in the Fock space")
        v[: amps.size] = amps
        return v / np.linalg.norm(v)
    raise ConfigError(f"unknown heterodyne state {cfg.state!r}")


def quadrature_operators(fock_dim: int) -> tuple[HermitianOperator, HermitianOperator]:
    a = np.diag(np.sqrt(np.arange(1, fock_dim)), k=1).astype(np.complex128)
    ad = a.conj().T
    return HermitianOperator((a + ad) / 2), HermitianOperator((a - ad) / 2j)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    axis: np.ndarray

    @property
    def step(self) -> float:
        return float(self.axis[1] - self.axis[0])

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(alpha_1, alpha_2)`` with ``alpha_1`` varying along axis 0."""
        return np.meshgrid(self.axis, self.axis, indexing="ij")


def heterodyne_pom(fock_dim: int, grid: PhaseSpaceGrid, occupied: int) -> tuple[ProbOperatorMeasure, float]:
    """Gridded coherent-state POM, renormalized to be exactly complete.

    With ``T = sum_alpha M_alpha`` the elements are replaced by
    ``T^(-1/2) M_alpha T^(-1/2)``.  Returns the POM and the deviation of ``T``
    from the identity on the first ``occupied`` Fock levels.
    """
    a1, a2 = grid.mesh()
    weight = grid.step**2 / np.pi
    vecs = coherent_amplitudes((a1 + 1j * a2).ravel(), fock_dim) * np.sqrt(weight)
    T = vecs.T @ vecs.conj()
    gap = float(np.max(np.abs(T[:occupied, :occupied] - np.eye(occupied))))
    evals, evecs = eigh(T)
    if evals[0] <= 0:
        raise ConfigError("gridded coherent states do not span the truncated Fock space")
    t_inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.conj().T
    vecs = vecs @ t_inv_sqrt.T
    ops = np.einsum("mi,mj->mij", vecs, vecs.conj())
    labels = tuple(f"{x:+.4f}{y:+.4f}i" for x, y in zip(a1.ravel(), a2.ravel()))
    return ProbOperatorMeasure(ops, labels, completeness_tol=1e-9), gap


@dataclass
class QuadratureResult:
    standard: EstimateReport
    optimal: EstimateReport
    optimal_values: np.ndarray
    closed_form_values: np.ndarray


@dataclass
class HeterodyneResult:
    config: HeterodyneConfig
    x: QuadratureResult
    y: QuadratureResult
    husimi: np.ndarray
    grid: PhaseSpaceGrid
    completeness_gap: float
    closed_form_max_deviation: float
    checks: dict = field(default_factory=dict)

    @property
    def standard_product(self) -> float:
        return self.x.standard.estimator_spread * self.y.standard.estimator_spread

    @property
    def optimal_product(self) -> float:
        return self.x.optimal.estimator_spread * self.y.optimal.estimator_spread

    @property
    def improvement(self) -> float:
        return self.standard_product / self.optimal_product


def log_derivative_estimates(Q: np.ndarray, grid: PhaseSpaceGrid) -> tuple[np.ndarray, np.ndarray]:
    """``alpha_k + (1/4) d_k ln Q`` by central differences on the grid (NaN on the rim)."""
    logQ = np.log(np.maximum(Q, Q_FLOOR))
    h = grid.step
    dx = np.full(Q.shape, np.nan)
    dy = np.full(Q.shape, np.nan)
    dx[1:-1, :] = (logQ[2:, :] - logQ[:-2, :]) / (2 * h)
    dy[:, 1:-1] = (logQ[:, 2:] - logQ[:, :-2]) / (2 * h)
    a1, a2 = grid.mesh()
    return a1 + 0.25 * dx, a2 + 0.25 * dy


def scenario_heterodyne(cfg: HeterodyneConfig) -> HeterodyneResult:
    N = cfg.fock_dim
    if N < 2 or cfg.grid_n < 8:
        raise ConfigError("need fock_dim >= 2 and grid_n >= 8")
    psi = state_amplitudes(cfg)
    norm = float(np.linalg.norm(psi) ** 2)
    if norm < 1.0 - TRUNCATION_NORM_TOL:
        raise ConfigError(f"state keeps only {norm:.10f} of its norm in {N} Fock levels")
    psi = psi / np.sqrt(norm)
    rho = DensityOperator(np.outer(psi, psi.conj()))

    pop = np.cumsum(np.abs(psi) ** 2)
    occupied = int(np.searchsorted(pop, OCCUPIED_POPULATION) + 1)
    occupied = min(occupied, N)

    radius = cfg.radius(occupied)
    if cfg.state == "coherent" and radius < abs(cfg.beta) + 5.0:
        raise ConfigError(f"grid radius {radius} is below |beta| + 5")
    grid = PhaseSpaceGrid(np.linspace(-radius, radius, cfg.grid_n))
    pom, gap = heterodyne_pom(N, grid, occupied)
    if gap > COMPLETENESS_GAP_TOL:
        raise ConfigError(f"gridded POM deviates from identity by {gap:.2e} on the occupied Fock block")

    a1, a2 = grid.mesh()
    overlaps = coherent_amplitudes(a1 + 1j * a2, N).conj() @ psi
    Q = np.abs(overlaps) ** 2 / np.pi
    cf_x, cf_y = log_derivative_estimates(Q, grid)
    region = Q >= Q_REGION * Q.max()

    X, Y = quadrature_operators(N)
    results = []
    deviation = 0.0
    for A, standard, closed in ((X, a1, cf_x), (Y, a2, cf_y)):
        moments = outcome_moments(rho, pom, A)
        f_opt = moments.optimal_values()
        results.append(QuadratureResult(
            standard=moments.analyze(standard.ravel()),
            optimal=moments.analyze(f_opt),
            optimal_values=f_opt.reshape(Q.shape),
            closed_form_values=closed,
        ))
        ok = region & np.isfinite(closed)
        deviation = max(deviation, float(np.max(np.abs(f_opt.reshape(Q.shape)[ok] - closed[ok]))))

    return HeterodyneResult(
        config=cfg, x=results[0], y=results[1], husimi=Q, grid=grid,
        completeness_gap=gap, closed_form_max_deviation=deviation,
    )
