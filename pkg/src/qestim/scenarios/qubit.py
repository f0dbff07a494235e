"""Single-qubit examples: optimal estimates and the unbiased joint measurement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..estimation import EstimateReport, JointReport, joint_check, outcome_moments, unbiased_product_check, unbiasedness_defect
from ..operators import (
    FOUR_OUTCOME_SIGNS,
    PAULI_X,
    PAULI_Y,
    DensityOperator,
    InvalidInputError,
    four_outcome_qubit_pom,
    qubit_basis_pom,
    qubit_observable,
    qubit_state,
)
from ..sampling import random_density, trial_rng


@dataclass
class QubitResult:
    report: EstimateReport
    optimal_values: np.ndarray
    probabilities: np.ndarray
    labels: tuple[str, ...]


def scenario_qubit(state: str = "+y", observable: str = "sz", basis: str = "x") -> QubitResult:
    rho = qubit_state(state)
    A = qubit_observable(observable)
    M = qubit_basis_pom(basis)
    moments = outcome_moments(rho, M, A)
    f_opt = moments.optimal_values()
    return QubitResult(moments.analyze(f_opt), f_opt, moments.probabilities, M.labels)


MAX_GAMMA = 1.0 / np.sqrt(2.0)


@dataclass
class UnbiasedJointResult:
    gamma: float
    product: JointReport
    joint: JointReport
    noise_sq_x: float
    noise_sq_y: float
    defect_x: float
    defect_y: float


def unbiased_estimators(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """``f = s1 / gamma`` and ``g = s2 / gamma`` on the four outcomes."""
    return FOUR_OUTCOME_SIGNS[:, 0] / gamma, FOUR_OUTCOME_SIGNS[:, 1] / gamma


def scenario_unbiased_joint(gamma: float = MAX_GAMMA, state="0") -> UnbiasedJointResult:
    if not 0 < gamma <= MAX_GAMMA + 1e-15:
        raise InvalidInputError(f"gamma must lie in (0, 1/sqrt(2)], got {gamma}")
    rho = state if isinstance(state, DensityOperator) else qubit_state(state)
    M = four_outcome_qubit_pom(gamma)
    f, g = unbiased_estimators(gamma)
    mx = outcome_moments(rho, M, PAULI_X)
    my = outcome_moments(rho, M, PAULI_Y)
    return UnbiasedJointResult(
        gamma=gamma,
        product=unbiased_product_check(rho, M, PAULI_X, PAULI_Y, f, g),
        joint=joint_check(rho, M, PAULI_X, PAULI_Y, f, g),
        noise_sq_x=mx.noise_sq(f),
        noise_sq_y=my.noise_sq(g),
        defect_x=unbiasedness_defect(M, f, PAULI_X),
        defect_y=unbiasedness_defect(M, g, PAULI_Y),
    )


def unbiased_state_sweep(gamma: float = MAX_GAMMA, states: int = 100, seed: int = 0) -> tuple[float, float]:
    """Smallest product-bound slack and joint-relation slack over random qubit states."""
    worst_product, worst_joint = np.inf, np.inf
    for i in range(states):
        res = scenario_unbiased_joint(gamma, random_density(2, trial_rng(seed, i)))
        worst_product = min(worst_product, res.product.slack)
        worst_joint = min(worst_joint, res.joint.slack)
    return float(worst_product), float(worst_joint)
