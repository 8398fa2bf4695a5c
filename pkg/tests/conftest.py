import numpy as np
import pytest

from rkq import engine
from rkq.problem import HamiltonianProblem, IvpProblem

BACKENDS = ["python"] + (["compiled"] if engine.COMPILED_AVAILABLE else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def still_problem():
    """rhs == 0 with a constant Hamiltonian: every method is exact."""
    return HamiltonianProblem(
        rhs=lambda t, y: np.zeros(2), t0=0.0, y0=np.array([0.3, -0.7]),
        jacobian=lambda t, y: np.zeros((2, 2)), name="still",
        hamiltonian=lambda p, q: 0.25 + 0 * p,
    )


@pytest.fixture
def decay_problem():
    """Scalar y' = y with exact solution exp(t)."""
    return IvpProblem(rhs=lambda t, y: y, t0=0.0, y0=np.array([1.0]),
                      exact_solution=lambda t: np.array([np.exp(t)]), name="decay")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
