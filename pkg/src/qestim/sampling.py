"""Seeded random states, observables and measurements for randomized checks.

Every trial draws from its own generator derived from ``(seed, trial index)``,
so results do not depend on the order or parallelism of evaluation.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .operators import DensityOperator, HermitianOperator, ProbOperatorMeasure

POM_KINDS = ("projective", "rank-one", "weighted")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.uniform(size=(1, 1)))
    return unitary_group.rvs(dim, random_state=rng)


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityOperator:
    v = haar_vector(dim, rng)
    return DensityOperator(np.outer(v, v.conj()))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Normalized random mixture of ``rank`` Haar-random pure states.

    ``rank`` defaults to a uniform draw from ``1..dim``, so rank-deficient
    states are common.
    """
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    u = haar_unitary(dim, rng)
    weights = rng.dirichlet(np.ones(rank))
    vecs = u[:, :rank]
    return DensityOperator((vecs * weights) @ vecs.conj().T)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> HermitianOperator:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * 0.5 * (g + g.conj().T))


def random_projective_pom(dim: int, rng: np.random.Generator) -> ProbOperatorMeasure:
    u = haar_unitary(dim, rng)
    return ProbOperatorMeasure(np.einsum("im,jm->mij", u, u.conj()))


def random_rank_one_pom(dim: int, rng: np.random.Generator, outcomes: int | None = None) -> ProbOperatorMeasure:
    """Rank-one POM from the rows of a Haar-random isometry ``C^dim -> C^outcomes``."""
    if outcomes is None:
        outcomes = int(rng.integers(dim, 2 * dim + 1))
    v = haar_unitary(outcomes, rng)[:, :dim]
    return ProbOperatorMeasure(np.einsum("mi,mj->mij", v.conj(), v))


def random_weighted_pom(dim: int, rng: np.random.Generator, projectors: int | None = None,
                        max_tries: int = 1000) -> ProbOperatorMeasure:
    """Weighted Haar-random projectors plus the deficit ``I - sum``.

    Draws are rejected and retried until the deficit is positive within 1e-12.
    The deficit element generally has full rank.
    """
    if projectors is None:
        projectors = int(rng.integers(1, 2 * dim + 1))
    for _ in range(max_tries):
        vecs = np.array([haar_vector(dim, rng) for _ in range(projectors)])
        weights = rng.uniform(0.0, 2.0 / projectors, size=projectors)
        ops = weights[:, None, None] * np.einsum("mi,mj->mij", vecs, vecs.conj())
        deficit = np.eye(dim) - ops.sum(axis=0)
        deficit = 0.5 * (deficit + deficit.conj().T)
        if np.linalg.eigvalsh(deficit)[0] >= -1e-12:
            return ProbOperatorMeasure(np.concatenate([ops, deficit[None]]))
    raise RuntimeError("could not draw a positive deficit operator")


def random_pom(dim: int, rng: np.random.Generator, kind: str | None = None) -> ProbOperatorMeasure:
    if kind is None:
        kind = POM_KINDS[int(rng.integers(len(POM_KINDS)))]
    if kind == "projective":
        return random_projective_pom(dim, rng)
    if kind == "rank-one":
        return random_rank_one_pom(dim, rng)
    if kind == "weighted":
        return random_weighted_pom(dim, rng)
    raise ValueError(f"unknown POM kind {kind!r}")
