import numpy as np
import pytest
from hypothesis import strategies as st

from bqtsim.statevector import from_amplitudes

ACCEPTANCE_LINES: list[str] = []


def dense_1q(g, q, n):
    """Full 2^n x 2^n operator for a one-qubit gate, built by Kronecker products."""
    ops = [np.eye(2)] * n
    ops[q] = g
    out = np.eye(1)
    for op in ops:
        out = np.kron(out, op)
    return out


def dense_permutation(n, flip):
    """Permutation matrix sending basis index i to flip(i)."""
    m = np.zeros((2**n, 2**n))
    for i in range(2**n):
        m[flip(i), i] = 1
    return m


def bit(i, q, n):
    return (i >> (n - 1 - q)) & 1


def random_state(rng, n):
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return from_amplitudes(v)


@st.composite
def states(draw, min_qubits=1, max_qubits=5):
    n = draw(st.integers(min_qubits, max_qubits))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_state(np.random.default_rng(seed), n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
