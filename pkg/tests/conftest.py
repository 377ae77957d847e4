import math

import numpy as np
import pytest

from semicoh.coherent import CoherentParams
from semicoh.hamiltonian import barrier_model, harmonic_model, polynomial_model

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig_params():
    return CoherentParams.from_b(0.3, 0.05)


@pytest.fixture(scope="session")
def barrier(fig_params):
    return barrier_model(1.0, 1.0, 5.0, 1.0, fig_params)


@pytest.fixture(scope="session")
def barrier_solution(barrier):
    from semicoh.quantum import build_basis, diagonalize
    return diagonalize(barrier, build_basis(barrier, N=400))


@pytest.fixture(scope="session")
def oscillator():
    omega, hbar = 1.3, 0.1
    return harmonic_model(omega, CoherentParams.natural(omega, hbar))


@pytest.fixture(scope="session")
def quartic():
    hbar = 0.1
    return polynomial_model([0, 0, 0, 0, 0.25], CoherentParams.from_b(math.sqrt(hbar), hbar))


def random_symplectic(rng, n):
    """n random real 2x2 matrices of unit determinant."""
    out = []
    for _ in range(n):
        a, b = rng.uniform(0, 2 * np.pi, 2)
        s = math.exp(rng.normal(scale=1.5))
        ra = np.array([[math.cos(a), math.sin(a)], [-math.sin(a), math.cos(a)]])
        rb = np.array([[math.cos(b), math.sin(b)], [-math.sin(b), math.cos(b)]])
        out.append(ra @ np.diag([s, 1 / s]) @ rb)
    return out
