"""Optimal estimates of quantum observables and joint-measurement uncertainty relations."""

__version__ = "0.1.0"

from .estimation import (
    EstimateReport,
    JointReport,
    OutcomeEstimator,
    OutcomeMoments,
    analyze_estimator,
    asym_overlap,
    joint_check,
    noise_lower_bound_sq,
    noise_sq,
    optimal_estimator,
    outcome_moments,
    outcome_probabilities,
    signal_overlap,
    unbiased_product_check,
    unbiasedness_defect,
)
from .operators import (
    DensityOperator,
    HermitianOperator,
    InvalidInputError,
    PreconditionError,
    ProbOperatorMeasure,
    commutator_bound,
    expectation,
    make_pure_state,
    projective_pom,
    variance,
)
