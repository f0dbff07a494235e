"""Randomized checks of the estimation identities and inequalities.

Each trial is an independent, seeded instance.  The kinds are

``joint``      slack of the joint-measurement relation for random states
               (any rank), random POMs and a mix of random, optimal,
               perturbed-optimal and constant estimators;
``geometric``  residual of spread^2 + noise^2 = variance for the optimal
               estimate, plus the gap between optimal noise and the lower bound;
``bound``      |optimal noise - lower bound| for pure states and rank-one POMs,
               the regime where the bound is attained.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimation import joint_check, outcome_moments
from .sampling import random_density, random_hermitian, random_pom, random_pure_state, trial_rng

SWEEP_KINDS = ("joint", "geometric", "bound")
TOLERANCE = 1e-9


def _joint_trial(dim: int, rng: np.random.Generator) -> float:
    rho = random_density(dim, rng)
    M = random_pom(dim, rng)
    A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
    mode = int(rng.integers(4))
    if mode == 0:
        f, g = rng.normal(size=len(M)), rng.normal(size=len(M))
    elif mode == 3:
        f, g = np.full(len(M), rng.normal()), np.full(len(M), rng.normal())
    else:
        f = outcome_moments(rho, M, A).optimal_values()
        g = outcome_moments(rho, M, B).optimal_values()
        if mode == 2:
            f = f + 0.1 * rng.normal(size=f.size)
            g = g + 0.1 * rng.normal(size=g.size)
    return joint_check(rho, M, A, B, f, g).slack


def _geometric_trial(dim: int, rng: np.random.Generator) -> tuple[float, float]:
    rho = random_density(dim, rng)
    M = random_pom(dim, rng)
    moments = outcome_moments(rho, M, random_hermitian(dim, rng))
    report = moments.analyze(moments.optimal_values())
    return abs(report.geometric_residual), report.bound_gap


def _bound_trial(dim: int, rng: np.random.Generator) -> float:
    rho = random_pure_state(dim, rng)
    M = random_pom(dim, rng, kind="projective" if rng.uniform() < 0.5 else "rank-one")
    moments = outcome_moments(rho, M, random_hermitian(dim, rng))
    return abs(moments.analyze(moments.optimal_values()).bound_gap)


_TRIALS = {"joint": _joint_trial, "geometric": _geometric_trial, "bound": _bound_trial}


@dataclass
class SweepResult:
    kind: str
    trials: int
    dim: int
    seed: int
    values: np.ndarray

    def summary(self) -> dict:
        v = self.values
        if self.kind == "joint":
            i = int(np.argmin(v))
            return {"min_slack": float(v[i]), "worst_trial": i, "mean_slack": float(v.mean())}
        if self.kind == "geometric":
            i = int(np.argmax(v[:, 0]))
            return {"max_identity_residual": float(v[i, 0]), "worst_trial": i,
                    "min_bound_gap": float(v[:, 1].min()), "max_bound_gap": float(v[:, 1].max())}
        i = int(np.argmax(v))
        return {"max_bound_residual": float(v[i]), "worst_trial": i}


def run_sweep(kind: str, trials: int, dim: int, seed: int, workers: int = 1) -> SweepResult:
    if kind not in _TRIALS:
        raise ValueError(f"unknown sweep kind {kind!r}")
    if trials < 1 or not 2 <= dim <= 16:
        raise ValueError("need trials >= 1 and 2 <= dim <= 16")
    trial = _TRIALS[kind]

    def one(i: int):
        return trial(dim, trial_rng(seed, i))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, range(trials)))
    else:
        values = [one(i) for i in range(trials)]
    return SweepResult(kind, trials, dim, seed, np.array(values, dtype=float))
