import pytest

from adiafact.compiler import reference_problem
from adiafact.engine import Schedule, transverse_field


@pytest.fixture(scope="session")
def reference():
    """The built-in three-qubit instance compiled with its default weights."""
    return reference_problem()


@pytest.fixture(scope="session")
def pair(reference):
    """(h0, hp) for the built-in instance."""
    return transverse_field(3), reference.hamiltonian


@pytest.fixture(scope="session")
def schedule():
    return Schedule(100, 0.05)
