import numpy as np
import pytest

from gcpart.circuit import CP, U, layer_circuit
from gcpart.network import QpuNetwork

GENERAL = U(0.4, 1.1, 0.2)

# row used with the chain circuits: lead q0 on QPU 0, partners spread over QPUs 1-3
CHAIN_ROW = np.array([0, 1, 2, 3, 1, 2, 0, 3])


@pytest.fixture
def chain_net():
    return QpuNetwork((2, 2, 2, 2))


@pytest.fixture
def chain_circuit():
    """One uninterrupted control chain from q0 to five partners."""
    return layer_circuit([(CP(0.3), (0, k)) for k in range(1, 6)], 6)


@pytest.fixture
def split_chain_circuit():
    """The same chain cut by a general rotation on q0 after the third gate."""
    ops = [(CP(0.3), (0, k)) for k in range(1, 4)]
    ops.append((GENERAL, (0,)))
    ops += [(CP(0.3), (0, k)) for k in range(4, 6)]
    return layer_circuit(ops, 6)


def constant(row, depth):
    return np.repeat(np.asarray(row)[None, :], depth, axis=0)


_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
