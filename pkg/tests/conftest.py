from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

from cbvqe.fixtures import fixture_paths, load_fixture

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_matrix(term, n_qubits):
    """Dense matrix of a Pauli term built from Kronecker products.

    Qubit 0 is the least significant bit, so it is the rightmost factor.
    """
    letters = []
    for q in range(n_qubits):
        x, z = (term.x_mask >> q) & 1, (term.z_mask >> q) & 1
        letters.append("IXZY"[x | (z << 1)])
    return complex(term.coefficient) * reduce(np.kron, [PAULI_1Q[c] for c in reversed(letters)])


def dense_oracle(H):
    dim = 1 << H.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for t in H.terms:
        out += kron_matrix(t, H.n_qubits)
    return out


@pytest.fixture(scope="session")
def h2():
    return load_fixture("h2_sto3g_4q")


@pytest.fixture(scope="session")
def synthetic():
    return load_fixture("synthetic_2q")


@pytest.fixture(scope="session")
def all_fixture_paths():
    return fixture_paths()


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
