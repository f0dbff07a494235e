import numpy as np
import pytest

from qestim.operators import PAULI_X, PAULI_Y, PAULI_Z, make_pure_state, maximally_mixed, qubit_basis_pom


@pytest.fixture
def ket0():
    return make_pure_state([1, 0])


@pytest.fixture
def plus_y():
    return make_pure_state([1, 1j])


@pytest.fixture
def mixed():
    return maximally_mixed(2)


@pytest.fixture
def z_basis():
    return qubit_basis_pom("z")


@pytest.fixture
def x_basis():
    return qubit_basis_pom("x")


@pytest.fixture
def paulis():
    return PAULI_X, PAULI_Y, PAULI_Z


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}  {title}: {detail}"
        _ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES, key=lambda item: item[0]):
            terminalreporter.write_line(line)
