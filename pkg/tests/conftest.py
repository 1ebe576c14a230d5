"""Shared dense-matrix oracles, independent of the package internals."""

import numpy as np

LETTERS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_word(p) -> np.ndarray:
    """Matrix of a PauliString; qubit q is bit q of the index (q=0 lowest)."""
    m = np.array([[1.0 + 0j]])
    for q in range(p.n_qubits):
        m = np.kron(LETTERS[p.letter(q)], m)
    return p.phase * m


def dense_expectation(vec: np.ndarray, p) -> complex:
    return complex(vec.conj() @ (dense_word(p) @ vec))
