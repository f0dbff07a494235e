"""Optimal estimation of an observable from the outcomes of a measurement.

An estimate assigns a real value ``f(m)`` to each outcome ``m`` of a POM.  Its
noise is the mean-square distance between the estimate and the observable,

    eps(A_f)^2 = sum_m f(m)^2 p_m - sum_m f(m) s_m + tr[rho A^2],

with ``p_m = tr[rho M_m]`` and ``s_m = tr[rho (A M_m + M_m A)]``.  This is
``<(A_f - A)^2>`` evaluated on any Naimark dilation of the measurement, and it
is minimized outcome-by-outcome by ``f_opt(m) = s_m / (2 p_m)``.

Everything downstream of the per-outcome numbers ``(p_m, s_m, |c_m|)`` lives on
:class:`OutcomeMoments`, so structured problems (e.g. commuting observables on
a large grid) can build those numbers directly and reuse the same code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (
    DensityOperator,
    InvalidInputError,
    PreconditionError,
    ProbOperatorMeasure,
    _check_dims,
    as_observable,
    commutator_bound,
)

DEAD_OUTCOME_THRESHOLD = 1e-12
IDENTITY_TOL = 1e-9
UNBIASED_TOL = 1e-9


@dataclass(frozen=True)
class OutcomeEstimator:
    """Real estimate value per POM outcome."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size == 0 or not np.all(np.isfinite(vals)):
            raise InvalidInputError("estimator values must be finite and non-empty")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def __add__(self, shift: float) -> "OutcomeEstimator":
        return OutcomeEstimator(self.values + shift)


def _as_estimator(f) -> OutcomeEstimator:
    return f if isinstance(f, OutcomeEstimator) else OutcomeEstimator(f)


@dataclass(frozen=True)
class EstimateReport:
    noise_sq: float
    noise_bound_sq: float
    estimator_mean: float
    estimator_variance: float
    observable_variance: float
    is_optimal: bool

    def __post_init__(self):
        if self.noise_sq < self.noise_bound_sq - IDENTITY_TOL * max(1.0, self.noise_bound_sq):
            raise ArithmeticError(f"noise {self.noise_sq!r} below its lower bound {self.noise_bound_sq!r}")

    @property
    def noise(self) -> float:
        return float(np.sqrt(self.noise_sq))

    @property
    def estimator_spread(self) -> float:
        return float(np.sqrt(self.estimator_variance))

    @property
    def observable_spread(self) -> float:
        return float(np.sqrt(self.observable_variance))

    @property
    def geometric_residual(self) -> float:
        """``(Delta A_f)^2 + eps^2 - (Delta A)^2``; zero for the optimal estimate."""
        return self.estimator_variance + self.noise_sq - self.observable_variance

    @property
    def bound_gap(self) -> float:
        return self.noise_sq - self.noise_bound_sq


@dataclass(frozen=True)
class JointReport:
    lhs: float
    rhs: float
    slack: float

    def holds(self, tol: float = IDENTITY_TOL) -> bool:
        return self.slack >= -tol


@dataclass(frozen=True)
class OutcomeMoments:
    """Per-outcome statistics of a (state, measurement, observable) triple.

    probabilities  p_m = tr[rho M_m]
    signal         s_m = tr[rho (A M_m + M_m A)]
    asym           |c_m| with c_m = tr[rho (A M_m - M_m A)]
    second_moment  tr[rho A^2]
    mean           tr[rho A]
    """

    probabilities: np.ndarray
    signal: np.ndarray
    asym: np.ndarray
    second_moment: float
    mean: float
    threshold: float = DEAD_OUTCOME_THRESHOLD

    @property
    def live(self) -> np.ndarray:
        return self.probabilities > self.threshold

    @property
    def observable_variance(self) -> float:
        return max(self.second_moment - self.mean**2, 0.0)

    def _check_length(self, f: OutcomeEstimator):
        if len(f) != self.probabilities.size:
            raise InvalidInputError(f"estimator has {len(f)} values for {self.probabilities.size} outcomes")

    def optimal_values(self) -> np.ndarray:
        live = self.live
        out = np.zeros_like(self.probabilities)
        out[live] = self.signal[live] / (2.0 * self.probabilities[live])
        return out

    def bound_sq(self) -> float:
        live = self.live
        return float(np.sum(self.asym[live] ** 2 / (4.0 * self.probabilities[live])))

    def noise_sq(self, f) -> float:
        f = _as_estimator(f)
        self._check_length(f)
        v = f.values
        raw = float(np.dot(v * v, self.probabilities) - np.dot(v, self.signal) + self.second_moment)
        bound = self.bound_sq()
        scale = max(1.0, abs(self.second_moment), float(np.dot(v * v, self.probabilities)))
        if raw < bound - IDENTITY_TOL * scale:
            raise ArithmeticError(f"noise {raw!r} fell below the lower bound {bound!r}")
        return max(raw, 0.0)

    def analyze(self, f) -> EstimateReport:
        f = _as_estimator(f)
        self._check_length(f)
        v, p = f.values, self.probabilities
        mean = float(np.dot(v, p))
        est_var = max(float(np.dot(v * v, p)) - mean * mean, 0.0)
        live = self.live
        is_opt = bool(np.all(np.abs(v[live] - self.optimal_values()[live]) <= IDENTITY_TOL))
        noise = self.noise_sq(f)
        return EstimateReport(
            noise_sq=noise,
            noise_bound_sq=self.bound_sq(),
            estimator_mean=mean,
            estimator_variance=est_var,
            observable_variance=self.observable_variance,
            is_optimal=is_opt,
        )


def _traces(rho: DensityOperator, M: ProbOperatorMeasure, A) -> tuple[np.ndarray, np.ndarray]:
    """Return ``tr[rho A M_m]`` and ``tr[rho M_m A]`` for every outcome."""
    ra = rho.matrix @ A.matrix
    ar = A.matrix @ rho.matrix
    # tr[X M] = sum_ij X_ij M_ji
    left = np.einsum("ij,mji->m", ra, M.operators)
    right = np.einsum("ij,mji->m", ar, M.operators)
    return left, right


def outcome_probabilities(rho: DensityOperator, M: ProbOperatorMeasure) -> np.ndarray:
    """``p_m = tr[rho M_m]`` with tiny negative rounding clamped to zero."""
    _check_dims(rho, M)
    p = np.einsum("ij,mji->m", rho.matrix, M.operators).real
    if np.min(p) < -1e-12:
        raise ArithmeticError(f"negative outcome probability {np.min(p):.3e}")
    return np.clip(p, 0.0, None)


def signal_overlap(rho: DensityOperator, M: ProbOperatorMeasure, A) -> np.ndarray:
    """``s_m = tr[rho (A M_m + M_m A)]`` (real)."""
    A = as_observable(A)
    _check_dims(rho, M, A)
    left, right = _traces(rho, M, A)
    s = left + right
    scale = max(1.0, float(np.max(np.abs(s))))
    if np.max(np.abs(s.imag)) > 1e-10 * scale:
        raise ArithmeticError("anticommutator trace has a non-negligible imaginary part")
    return s.real


def asym_overlap(rho: DensityOperator, M: ProbOperatorMeasure, A) -> np.ndarray:
    """``|c_m|`` with ``c_m = tr[rho (A M_m - M_m A)]``, which is purely imaginary."""
    A = as_observable(A)
    _check_dims(rho, M, A)
    left, right = _traces(rho, M, A)
    c = left - right
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.max(np.abs(c.real)) > 1e-10 * scale:
        raise ArithmeticError("commutator trace has a non-negligible real part")
    return np.abs(c.imag)


def outcome_moments(rho: DensityOperator, M: ProbOperatorMeasure, A, threshold: float = DEAD_OUTCOME_THRESHOLD
                    ) -> OutcomeMoments:
    A = as_observable(A)
    _check_dims(rho, M, A)
    left, right = _traces(rho, M, A)
    s, c = left + right, left - right
    scale = max(1.0, float(np.max(np.abs(left))))
    if np.max(np.abs(s.imag)) > 1e-10 * scale or np.max(np.abs(c.real)) > 1e-10 * scale:
        raise ArithmeticError("overlap traces are not of the expected real/imaginary form")
    return OutcomeMoments(
        probabilities=outcome_probabilities(rho, M),
        signal=s.real,
        asym=np.abs(c.imag),
        second_moment=float(np.trace(rho.matrix @ A.squared()).real),
        mean=float(np.trace(rho.matrix @ A.matrix).real),
        threshold=threshold,
    )


def noise_sq(rho, M, A, f) -> float:
    """Mean-square noise ``eps(A_f)^2`` of the estimate ``f`` of ``A``."""
    return outcome_moments(rho, M, A).noise_sq(f)


def optimal_estimator(rho, M, A, threshold: float = DEAD_OUTCOME_THRESHOLD) -> OutcomeEstimator:
    """``f_opt(m) = s_m / (2 p_m)``; outcomes with ``p_m <= threshold`` get 0."""
    return OutcomeEstimator(outcome_moments(rho, M, A, threshold).optimal_values())


def noise_lower_bound_sq(rho, M, A, threshold: float = DEAD_OUTCOME_THRESHOLD) -> float:
    """``sum_m |c_m|^2 / (4 p_m)`` over outcomes with ``p_m > threshold``.

    Every estimate has at least this much noise.  The optimal estimate attains
    it when ``rho`` is pure and every ``M_m`` has rank one (and no outcome is
    dead); otherwise it is generally strict.
    """
    return outcome_moments(rho, M, A, threshold).bound_sq()


def analyze_estimator(rho, M, A, f, threshold: float = DEAD_OUTCOME_THRESHOLD) -> EstimateReport:
    return outcome_moments(rho, M, A, threshold).analyze(f)


def joint_from_reports(report_a: EstimateReport, report_b: EstimateReport, rhs: float) -> JointReport:
    ea, eb = report_a.noise, report_b.noise
    da, db = report_a.estimator_spread, report_b.estimator_spread
    lhs = da * eb + ea * db + ea * eb
    return JointReport(lhs=lhs, rhs=rhs, slack=lhs - rhs)


def joint_check(rho, M, A, B, f, g) -> JointReport:
    """Evaluate both sides of the joint-measurement uncertainty relation

        Delta A_f eps(B_g) + eps(A_f) Delta B_g + eps(A_f) eps(B_g) >= |<[A, B]>| / 2
    """
    A, B = as_observable(A), as_observable(B)
    ra = analyze_estimator(rho, M, A, f)
    rb = analyze_estimator(rho, M, B, g)
    return joint_from_reports(ra, rb, commutator_bound(rho, A, B))


def unbiasedness_defect(M: ProbOperatorMeasure, f, A) -> float:
    """``max |sum_m f(m) M_m - A|``; zero iff ``<A_f> = <A>`` for every state."""
    A = as_observable(A)
    f = _as_estimator(f)
    _check_dims(M, A)
    if len(f) != M.num_outcomes:
        raise InvalidInputError(f"estimator has {len(f)} values for {M.num_outcomes} outcomes")
    first_moment = np.einsum("m,mij->ij", f.values, M.operators)
    return float(np.max(np.abs(first_moment - A.matrix)))


def unbiased_product_check(rho, M, A, B, f, g, tol: float = UNBIASED_TOL) -> JointReport:
    """``eps(A_f) eps(B_g) >= |<[A, B]>| / 2`` for estimates unbiased on all states."""
    A, B = as_observable(A), as_observable(B)
    for name, est, obs in (("f", f, A), ("g", g, B)):
        defect = unbiasedness_defect(M, est, obs)
        if defect > tol:
            raise PreconditionError(f"estimator {name} is biased (defect {defect:.3e}); product bound not claimed")
    lhs = np.sqrt(noise_sq(rho, M, A, f) * noise_sq(rho, M, B, g))
    rhs = commutator_bound(rho, A, B)
    return JointReport(lhs=float(lhs), rhs=rhs, slack=float(lhs - rhs))
