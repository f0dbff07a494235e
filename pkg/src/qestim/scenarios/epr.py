"""Estimating Bob's momentum from Alice's momentum reading on an approximate EPR state.

The two-mode state

    psi(x, x') ~ exp[-(x - x' - a)^2 / 4 sigma^2 - tau^2 (x + x')^2 / 4 hbar^2] exp[i b (x + x') / 2 hbar]

is sampled on an ``n x n`` position grid and transformed to the joint momentum
representation.  Alice's measurement is binned momentum of mode 1 and the
target observable is the momentum ``P'`` of mode 2.  Both are diagonal in the
joint momentum basis, so the per-outcome moments reduce to sums over the
momentum-space density and the general estimation code runs on them directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..estimation import EstimateReport, OutcomeMoments
from ..grid import AliasingError, Grid1D, GridWavefunction, check_boundary_decay, epr_momentum_transform, fourier_transform
from .heterodyne import ConfigError

# exp(-x^2) = 1e-7 at this x; sets the automatic grid extent
_DECAY_ARG = float(np.sqrt(np.log(1e7)))
CENTRAL_MASS = 0.90


@dataclass(frozen=True)
class EprConfig:
    sigma: float = 0.5
    tau: float = 0.5
    a: float = 0.0
    b: float = 0.0
    hbar: float = 1.0
    grid_n: int = 256
    half_width: float | None = None
    bin_factor: int = 1

    def __post_init__(self):
        if not (self.sigma > 0 and self.tau > 0 and self.hbar > 0):
            raise ConfigError("sigma, tau and hbar must be positive")
        if not self.sigma * self.tau < self.hbar:
            raise ConfigError(f"need sigma*tau < hbar, got {self.sigma * self.tau} >= {self.hbar}")
        if self.grid_n < 16 or self.bin_factor < 1 or self.grid_n % self.bin_factor:
            raise ConfigError("grid_n must be >= 16 and divisible by bin_factor")

    def extent(self) -> float:
        """Half-width of the position grid that holds the state to 1e-7 of its peak amplitude."""
        if self.half_width is not None:
            return float(self.half_width)
        u = abs(self.a) + 2 * self.sigma * _DECAY_ARG
        v = 2 * self.hbar * _DECAY_ARG / self.tau
        return 0.5 * (u + v) * 1.05

    @property
    def product(self) -> float:
        return (self.sigma * self.tau / self.hbar) ** 2


def closed_form_estimate(p, cfg: EprConfig):
    """Closed-form optimal estimate of ``P'`` given ``P = p``."""
    h2, st2 = cfg.hbar**2, (cfg.sigma * cfg.tau) ** 2
    return (h2 * (cfg.b - np.asarray(p)) + st2 * np.asarray(p)) / (h2 + st2)


def closed_form_noise_ratio(cfg: EprConfig) -> float:
    return float((1.0 + cfg.product) ** -0.5)


def epr_wavefunction(cfg: EprConfig) -> GridWavefunction:
    grid = Grid1D.centered(cfg.grid_n, cfg.extent(), cfg.hbar)
    x, xp = np.meshgrid(grid.points, grid.points, indexing="ij")
    u, v = x - xp, x + xp
    amps = np.exp(-((u - cfg.a) ** 2) / (4 * cfg.sigma**2) - cfg.tau**2 * v**2 / (4 * cfg.hbar**2)
                  + 1j * cfg.b * v / (2 * cfg.hbar))
    return GridWavefunction((grid, grid), amps)


def joint_momentum_representation(cfg: EprConfig) -> GridWavefunction:
    psi = epr_wavefunction(cfg)
    try:
        phi = epr_momentum_transform(psi)
        phi = fourier_transform(phi, axis=1)
        for axis in (0, 1):
            check_boundary_decay(phi.amplitudes, axis)
    except AliasingError as err:
        raise ConfigError(f"grid does not resolve the EPR state: {err}") from None
    return phi


def binned_moments(phi: GridWavefunction, bin_factor: int = 1) -> tuple[OutcomeMoments, np.ndarray]:
    """Outcome moments for mode-1 momentum bins and target ``P'`` (mode 2).

    Returns the moments and the bin-center momenta.
    """
    gp, gq = phi.grids
    w = phi.density() * phi.cell
    p, q = gp.points, gq.points
    prob = w.sum(axis=1).reshape(-1, bin_factor).sum(axis=1)
    signal = 2.0 * (w @ q).reshape(-1, bin_factor).sum(axis=1)
    centers = p.reshape(-1, bin_factor).mean(axis=1)
    q_marginal = w.sum(axis=0)
    moments = OutcomeMoments(
        probabilities=prob,
        signal=signal,
        asym=np.zeros_like(prob),
        second_moment=float(q_marginal @ q**2),
        mean=float(q_marginal @ q),
    )
    return moments, centers


def central_mask(prob: np.ndarray, mass: float = CENTRAL_MASS) -> np.ndarray:
    """Outcomes inside the central ``mass`` of the distribution (equal tails cut)."""
    cdf = np.cumsum(prob) / prob.sum()
    lo, hi = (1 - mass) / 2, 1 - (1 - mass) / 2
    return (cdf >= lo) & (cdf - prob / prob.sum() <= hi)


@dataclass
class EprResult:
    config: EprConfig
    momenta: np.ndarray
    probabilities: np.ndarray
    optimal_values: np.ndarray
    closed_form_values: np.ndarray
    optimal: EstimateReport
    naive: EstimateReport
    central: np.ndarray = field(repr=False)

    @property
    def noise_ratio(self) -> float:
        return self.optimal.noise / self.naive.noise

    @property
    def closed_form_ratio(self) -> float:
        return closed_form_noise_ratio(self.config)

    @property
    def estimate_relative_error(self) -> float:
        """Largest estimate deviation over the central mass, relative to the largest formula value there."""
        c = self.central
        scale = np.max(np.abs(self.closed_form_values[c]))
        return float(np.max(np.abs(self.optimal_values[c] - self.closed_form_values[c])) / scale)

    @property
    def naive_deviation(self) -> float:
        """Largest ``|f_opt(p) - (b - p)|`` over the central mass."""
        c = self.central
        return float(np.max(np.abs(self.optimal_values[c] - (self.config.b - self.momenta[c]))))


def scenario_epr(cfg: EprConfig) -> EprResult:
    phi = joint_momentum_representation(cfg)
    moments, centers = binned_moments(phi, cfg.bin_factor)
    f_opt = moments.optimal_values()
    naive = cfg.b - centers
    return EprResult(
        config=cfg,
        momenta=centers,
        probabilities=moments.probabilities,
        optimal_values=f_opt,
        closed_form_values=closed_form_estimate(centers, cfg),
        optimal=moments.analyze(f_opt),
        naive=moments.analyze(naive),
        central=central_mask(moments.probabilities),
    )
