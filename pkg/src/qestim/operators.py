"""Validated quantum objects on finite-dimensional Hilbert spaces.

States, observables and measurements are thin immutable wrappers around dense
``complex128`` numpy arrays.  Constructors check the physical constraints
(Hermiticity, positivity, unit trace, completeness) and store a symmetrized,
read-only copy of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

HERMITICITY_TOL = 1e-12
POSITIVITY_TOL = 1e-10
TRACE_TOL = 1e-10
COMPLETENESS_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-10


class InvalidInputError(ValueError):
    """Raised when an input violates a documented precondition."""


class PreconditionError(InvalidInputError):
    """Raised when a check is requested outside the regime where it is valid."""


PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)


def _as_square(matrix, name: str) -> np.ndarray:
    arr = np.array(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def _symmetrized(arr: np.ndarray, name: str, tol: float) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(arr))))
    defect = float(np.max(np.abs(arr - arr.conj().T)))
    if defect > tol * scale:
        raise InvalidInputError(f"{name} is not Hermitian (max |X - X^dag| = {defect:.3e})")
    out = 0.5 * (arr + arr.conj().T)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class HermitianOperator:
    """An observable: a Hermitian ``dim x dim`` matrix."""

    matrix: np.ndarray
    tol: float = field(default=HERMITICITY_TOL, repr=False, compare=False)

    def __post_init__(self):
        arr = _as_square(self.matrix, "observable")
        object.__setattr__(self, "matrix", _symmetrized(arr, "observable", self.tol))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other):
        if isinstance(other, HermitianOperator):
            return HermitianOperator(self.matrix + other.matrix)
        return HermitianOperator(self.matrix + float(other) * np.eye(self.dim))

    def __rmul__(self, scalar):
        return HermitianOperator(float(scalar) * self.matrix)

    def squared(self) -> np.ndarray:
        return self.matrix @ self.matrix


@dataclass(frozen=True)
class DensityOperator:
    """A state: positive semidefinite, unit-trace Hermitian matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = _symmetrized(_as_square(self.matrix, "density operator"), "density operator", HERMITICITY_TOL)
        trace = float(np.trace(arr).real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidInputError(f"density operator trace is {trace!r}, expected 1")
        min_eig = float(np.linalg.eigvalsh(arr)[0])
        if min_eig < -POSITIVITY_TOL:
            raise InvalidInputError(f"density operator has negative eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class ProbOperatorMeasure:
    """A measurement: positive operators ``M_m`` that sum to the identity.

    ``operators`` is stored as a stacked array of shape ``(outcomes, dim, dim)``.
    ``completeness_tol`` may be relaxed for deliberately truncated measurements.
    """

    operators: np.ndarray
    labels: tuple[str, ...] = ()
    completeness_tol: float = COMPLETENESS_TOL

    def __post_init__(self):
        ops = np.array(self.operators, dtype=np.complex128)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] == 0:
            raise InvalidInputError(f"POM operators must have shape (K, d, d), got {ops.shape}")
        if not np.all(np.isfinite(ops)):
            raise InvalidInputError("POM has non-finite entries")
        dagger = ops.conj().transpose(0, 2, 1)
        scale = max(1.0, float(np.max(np.abs(ops))))
        defect = float(np.max(np.abs(ops - dagger)))
        if defect > HERMITICITY_TOL * scale:
            raise InvalidInputError(f"POM element is not Hermitian (defect {defect:.3e})")
        ops = 0.5 * (ops + dagger)
        min_eig = float(np.min(np.linalg.eigvalsh(ops)[:, 0]))
        if min_eig < -POSITIVITY_TOL:
            raise InvalidInputError(f"POM element has negative eigenvalue {min_eig:.3e}")
        total = ops.sum(axis=0)
        gap = float(np.max(np.abs(total - np.eye(ops.shape[1]))))
        if gap > self.completeness_tol:
            raise InvalidInputError(f"POM elements do not sum to identity (max deviation {gap:.3e})")
        ops.flags.writeable = False
        labels = tuple(str(s) for s in self.labels) if self.labels else tuple(str(m) for m in range(len(ops)))
        if len(labels) != len(ops):
            raise InvalidInputError(f"{len(labels)} labels for {len(ops)} outcomes")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    @property
    def num_outcomes(self) -> int:
        return self.operators.shape[0]

    def __len__(self) -> int:
        return self.num_outcomes

    def __iter__(self):
        return iter(zip(self.labels, self.operators))


def _check_dims(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise InvalidInputError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def as_observable(A) -> HermitianOperator:
    return A if isinstance(A, HermitianOperator) else HermitianOperator(A)


def make_pure_state(amplitudes: Sequence[complex]) -> DensityOperator:
    """Return the normalized rank-one density operator ``|psi><psi|``."""
    psi = np.asarray(amplitudes, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if psi.size == 0 or norm == 0.0 or not np.isfinite(norm):
        raise InvalidInputError("state vector must be nonzero and finite")
    psi = psi / norm
    return DensityOperator(np.outer(psi, psi.conj()))


def make_mixed_state(weights: Sequence[float], vectors: Sequence[Sequence[complex]]) -> DensityOperator:
    """Convex mixture ``sum_k w_k |v_k><v_k|`` of normalized vectors."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or w.sum() <= 0:
        raise InvalidInputError("mixture weights must be non-negative and not all zero")
    w = w / w.sum()
    rho = sum(wk * make_pure_state(v).matrix for wk, v in zip(w, vectors))
    return DensityOperator(rho)


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=np.complex128) / dim)


def projective_pom(basis: Sequence[Sequence[complex]], labels: Sequence[str] = ()) -> ProbOperatorMeasure:
    """Rank-one projectors onto an orthonormal basis."""
    vecs = np.array([np.asarray(v, dtype=np.complex128).ravel() for v in basis])
    if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
        raise InvalidInputError(f"need d vectors of length d, got array of shape {vecs.shape}")
    gram = vecs.conj() @ vecs.T
    gap = float(np.max(np.abs(gram - np.eye(len(vecs)))))
    if gap > ORTHONORMALITY_TOL:
        raise InvalidInputError(f"basis is not orthonormal (max Gram deviation {gap:.3e})")
    ops = np.einsum("mi,mj->mij", vecs, vecs.conj())
    return ProbOperatorMeasure(ops, tuple(labels))


def rank_one_pom(vectors: np.ndarray, labels: Sequence[str] = (), completeness_tol: float = COMPLETENESS_TOL
                 ) -> ProbOperatorMeasure:
    """POM with elements ``|v_m><v_m|`` built from (unnormalized) rows of ``vectors``."""
    vecs = np.asarray(vectors, dtype=np.complex128)
    ops = np.einsum("mi,mj->mij", vecs, vecs.conj())
    return ProbOperatorMeasure(ops, tuple(labels), completeness_tol)


def expectation(rho: DensityOperator, A) -> float:
    """``Re tr[rho A]``; the discarded imaginary part must be below 1e-10."""
    A = as_observable(A)
    _check_dims(rho, A)
    value = np.trace(rho.matrix @ A.matrix)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise ArithmeticError(f"tr[rho A] has imaginary part {value.imag:.3e}")
    return float(value.real)


def variance(rho: DensityOperator, A) -> float:
    """``<A^2> - <A>^2``, clamped at zero."""
    A = as_observable(A)
    _check_dims(rho, A)
    mean = expectation(rho, A)
    second = float(np.trace(rho.matrix @ A.squared()).real)
    var = second - mean * mean
    if var < -1e-10 * max(1.0, second):
        raise ArithmeticError(f"negative variance {var:.3e}")
    return max(var, 0.0)


def commutator_bound(rho: DensityOperator, A, B) -> float:
    """Robertson right-hand side ``|tr[rho (AB - BA)]| / 2``."""
    A, B = as_observable(A), as_observable(B)
    _check_dims(rho, A, B)
    a, b = A.matrix, B.matrix
    return 0.5 * float(abs(np.trace(rho.matrix @ (a @ b - b @ a))))


QUBIT_STATES = {
    "0": (1, 0),
    "1": (0, 1),
    "+x": (1, 1),
    "-x": (1, -1),
    "+y": (1, 1j),
    "-y": (1, -1j),
    "+z": (1, 0),
    "-z": (0, 1),
}

QUBIT_OBSERVABLES = {"sx": PAULI_X, "sy": PAULI_Y, "sz": PAULI_Z, "id": IDENTITY_2}

QUBIT_BASES = {
    "z": [(1, 0), (0, 1)],
    "x": [np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)],
    "y": [np.array([1, 1j]) / np.sqrt(2), np.array([1, -1j]) / np.sqrt(2)],
}


def qubit_state(name: str) -> DensityOperator:
    """Named qubit state: ``0``, ``1``, ``+x``, ``-x``, ``+y``, ``-y``, ``+z``, ``-z`` or ``mixed``."""
    if name == "mixed":
        return maximally_mixed(2)
    try:
        return make_pure_state(QUBIT_STATES[name])
    except KeyError:
        raise InvalidInputError(f"unknown qubit state {name!r}") from None


def qubit_observable(name: str) -> HermitianOperator:
    try:
        return HermitianOperator(QUBIT_OBSERVABLES[name])
    except KeyError:
        raise InvalidInputError(f"unknown qubit observable {name!r}") from None


def qubit_basis_pom(name: str) -> ProbOperatorMeasure:
    try:
        basis = QUBIT_BASES[name]
    except KeyError:
        raise InvalidInputError(f"unknown qubit basis {name!r}") from None
    return projective_pom(basis, labels=(f"+{name}", f"-{name}"))


def four_outcome_qubit_pom(gamma: float) -> ProbOperatorMeasure:
    """Noisy joint sigma_x/sigma_y measurement ``(I + gamma (s1 X + s2 Y)) / 4``.

    Outcomes are ordered ``(s1, s2) = (+,+), (+,-), (-,+), (-,-)``.
    Positivity requires ``0 <= gamma <= 1/sqrt(2)``.
    """
    ops, labels = [], []
    for s1 in (1, -1):
        for s2 in (1, -1):
            ops.append(0.25 * (IDENTITY_2 + gamma * (s1 * PAULI_X + s2 * PAULI_Y)))
            labels.append(f"{'+' if s1 > 0 else '-'}{'+' if s2 > 0 else '-'}")
    return ProbOperatorMeasure(np.array(ops), tuple(labels))


FOUR_OUTCOME_SIGNS = np.array([(1, 1), (1, -1), (-1, 1), (-1, -1)], dtype=float)
