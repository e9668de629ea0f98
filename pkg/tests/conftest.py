"""Shared test helpers: literal gate matrices and dense reference tools.

Oracles here are built from first principles (explicit 2x2 literals, kron,
matrix products) so tests do not lean on the code under test.
"""

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
H2 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S2 = np.array([[1, 0], [0, 1j]], dtype=complex)
PAULIS_1Q = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}

# diag(e^{-i pi/4}, e^{+i pi/4}, e^{+i pi/4}, e^{-i pi/4})
UZZ_REF = np.diag(np.exp(-1j * np.pi / 4 * np.array([1, -1, -1, 1])))


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix_from_label(label: str) -> np.ndarray:
    """Dense matrix for an unsigned Pauli string, qubit 0 leftmost."""
    return kron_all([PAULIS_1Q[c] for c in label])


def all_pauli_labels(n: int):
    labels = [""]
    for _ in range(n):
        labels = [s + c for s in labels for c in "IXYZ"]
    return labels


def ptm_from_matrix_map(apply_fn, n: int) -> np.ndarray:
    """Build a PTM column by column from a density-matrix map."""
    d = 2 ** n
    labels = all_pauli_labels(n)
    basis = [pauli_matrix_from_label(s) for s in labels]
    mat = np.empty((d * d, d * d))
    for j, pj in enumerate(basis):
        image = apply_fn(pj)
        for i, pi in enumerate(basis):
            mat[i, j] = np.real(np.trace(pi @ image)) / d
    return mat


def ptm_of_unitary_ref(u: np.ndarray) -> np.ndarray:
    return ptm_from_matrix_map(lambda rho: u @ rho @ u.conj().T,
                               int(np.log2(u.shape[0])))


def ptm_of_kraus_ref(kraus, n: int) -> np.ndarray:
    return ptm_from_matrix_map(
        lambda rho: sum(k @ rho @ k.conj().T for k in kraus), n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
