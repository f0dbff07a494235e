import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qestim.operators import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DensityOperator,
    HermitianOperator,
    InvalidInputError,
    ProbOperatorMeasure,
    commutator_bound,
    expectation,
    make_pure_state,
    maximally_mixed,
    projective_pom,
    variance,
)
from qestim.sampling import random_density, random_hermitian, random_projective_pom, trial_rng


class TestMakePureState:
    def test_basis_state(self):
        np.testing.assert_allclose(make_pure_state([1, 0]).matrix, np.diag([1, 0]))

    def test_plus_x(self):
        np.testing.assert_allclose(make_pure_state([1, 1]).matrix, np.full((2, 2), 0.5))

    def test_unnormalized_complex(self):
        # (1, i)/sqrt2 outer product, written out by hand
        expected = np.array([[0.5, -0.5j], [0.5j, 0.5]])
        np.testing.assert_allclose(make_pure_state([1, 1j]).matrix, expected, atol=1e-15)

    def test_rank_one_trace_one(self, rng):
        rho = make_pure_state(rng.normal(size=5) + 1j * rng.normal(size=5))
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.matrix_rank(rho.matrix, tol=1e-10) == 1

    def test_zero_vector_rejected(self):
        with pytest.raises(InvalidInputError):
            make_pure_state([0, 0])


class TestValidation:
    def test_non_hermitian_observable(self):
        with pytest.raises(InvalidInputError, match="Hermitian"):
            HermitianOperator([[0, 1], [0, 0]])

    def test_observable_rounding_is_symmetrized(self):
        a = PAULI_Y.copy()
        a[0, 1] += 1e-14
        op = HermitianOperator(a)
        np.testing.assert_array_equal(op.matrix, op.matrix.conj().T)

    def test_density_trace(self):
        with pytest.raises(InvalidInputError, match="trace"):
            DensityOperator(np.eye(2))

    def test_density_positivity(self):
        with pytest.raises(InvalidInputError, match="negative eigenvalue"):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_density_small_negative_rounding_accepted(self):
        DensityOperator(np.diag([1.0 + 5e-11, -5e-11]))

    def test_incomplete_pom(self):
        with pytest.raises(InvalidInputError, match="identity"):
            ProbOperatorMeasure(np.array([np.diag([1, 0]), np.diag([0, 0.9])]))

    def test_non_positive_pom(self):
        with pytest.raises(InvalidInputError, match="negative"):
            ProbOperatorMeasure(np.array([np.diag([1.2, 0]), np.diag([-0.2, 1.0])]))

    def test_relaxed_completeness(self):
        ops = np.array([np.diag([1, 0]), np.diag([0, 1 - 1e-6])])
        ProbOperatorMeasure(ops, completeness_tol=1e-5)

    def test_immutable(self, ket0):
        with pytest.raises(ValueError):
            ket0.matrix[0, 0] = 2

    def test_density_eigenvalue_invariant(self):
        for i in range(50):
            rho = random_density(4, trial_rng(3, i))
            ev = rho.eigenvalues()
            assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
            assert abs(np.trace(rho.matrix).real - 1) <= 1e-10


class TestProjectivePom:
    def test_z_basis(self):
        M = projective_pom([(1, 0), (0, 1)])
        np.testing.assert_allclose(M.operators, [np.diag([1, 0]), np.diag([0, 1])])

    def test_x_basis(self):
        s = 1 / np.sqrt(2)
        M = projective_pom([(s, s), (s, -s)])
        np.testing.assert_allclose(M.operators[0], [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)
        np.testing.assert_allclose(M.operators[1], [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_random_basis_complete(self, rng):
        u = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))[0]
        M = projective_pom(u.T)
        np.testing.assert_allclose(M.operators.sum(axis=0), np.eye(5), atol=1e-12)

    def test_non_orthonormal_rejected(self):
        with pytest.raises(InvalidInputError, match="orthonormal"):
            projective_pom([(1, 0), (1, 1)])


class TestMoments:
    def test_expectation_examples(self, ket0, mixed):
        assert expectation(mixed, PAULI_Z) == pytest.approx(0.0, abs=1e-15)
        assert expectation(ket0, PAULI_Z) == pytest.approx(1.0)

    def test_expectation_double_sum_oracle(self, rng):
        rho = random_density(3, rng)
        A = random_hermitian(3, rng)
        oracle = 0j
        for j in range(3):
            for k in range(3):
                oracle += rho.matrix[j, k] * A.matrix[k, j]
        assert expectation(rho, A) == pytest.approx(oracle.real, abs=1e-12)

    def test_expectation_dimension_mismatch(self, ket0):
        with pytest.raises(InvalidInputError, match="dimension"):
            expectation(ket0, np.eye(3))

    def test_variance_examples(self, ket0, mixed):
        assert variance(ket0, PAULI_Z) == 0.0
        assert variance(ket0, PAULI_X) == pytest.approx(1.0)
        assert variance(mixed, PAULI_Z) == pytest.approx(1.0)

    def test_commutator_bound_examples(self, ket0, mixed):
        assert commutator_bound(ket0, PAULI_X, PAULI_X) == 0.0
        assert commutator_bound(ket0, PAULI_X, PAULI_Y) == pytest.approx(1.0)
        assert commutator_bound(mixed, PAULI_X, PAULI_Y) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(-5, 5), beta=st.floats(-5, 5), dim=st.integers(2, 6))
def test_expectation_is_linear(seed, alpha, beta, dim):
    rng = np.random.default_rng(seed)
    rho = random_density(dim, rng)
    A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
    combined = HermitianOperator(alpha * A.matrix + beta * B.matrix)
    expected = alpha * expectation(rho, A) + beta * expectation(rho, B)
    assert expectation(rho, combined) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 6))
def test_commutator_bound_symmetric(seed, dim):
    rng = np.random.default_rng(seed)
    rho = random_density(dim, rng)
    A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
    assert commutator_bound(rho, A, B) == commutator_bound(rho, B, A)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-10, 10), dim=st.integers(2, 6))
def test_variance_shift_invariant(seed, shift, dim):
    rng = np.random.default_rng(seed)
    rho = random_density(dim, rng)
    A = random_hermitian(dim, rng)
    assert variance(rho, A + shift) == pytest.approx(variance(rho, A), abs=1e-10)


def test_random_projective_pom_is_complete():
    M = random_projective_pom(6, trial_rng(0, 0))
    np.testing.assert_allclose(M.operators.sum(axis=0), np.eye(6), atol=1e-12)


def test_maximally_mixed():
    np.testing.assert_allclose(maximally_mixed(3).matrix, np.eye(3) / 3)
