import math

import numpy as np
import pytest

from stochzeno import basis_state, make_bimodal, rabi_hamiltonian

# Delta H = 2.5 kHz read as an ordinary frequency
DELTA_H = 2 * math.pi * 2500.0

ACCEPTANCE_LINES = []


def cos_q(mu):
    """Closed-form survival of the resonant two-level model, independent of the library."""
    return math.cos(DELTA_H * mu) ** 2


@pytest.fixture
def rabi():
    return rabi_hamiltonian(DELTA_H)


@pytest.fixture
def psi0():
    return basis_state(2, 0)


@pytest.fixture
def bimodal_2_10():
    return make_bimodal(2e-6, 10e-6, 0.8)


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
