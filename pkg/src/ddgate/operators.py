"""Dense operator construction for two qubits and one or two truncated modes.

Tensor order is (qubit 1, qubit 2, mode a[, mode b]); states reshape to
(2, 2, n_a[, n_b]).
"""

from __future__ import annotations

from functools import reduce

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SMINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0| with |0> spin-up
I2 = np.eye(2, dtype=complex)


def destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(op: np.ndarray, site: int, dims: tuple[int, ...]) -> np.ndarray:
    """Lift a single-site operator into the full tensor product."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[site] = op
    return kron_all(*factors)


def collective(op: np.ndarray, dims: tuple[int, ...], sign: int = +1) -> np.ndarray:
    """S = op_1 + sign * op_2 on the two qubit slots."""
    return embed(op, 0, dims) + sign * embed(op, 1, dims)


def thermal_weights(nbar: float, n_levels: int) -> np.ndarray:
    """Truncated geometric occupation, renormalised to unit total."""
    if nbar == 0.0:
        w = np.zeros(n_levels)
        w[0] = 1.0
        return w
    q = nbar / (nbar + 1.0)
    w = (1.0 - q) * q ** np.arange(n_levels)
    return w / w.sum()


def thermal_density(nbar: float, n_levels: int) -> np.ndarray:
    return np.diag(thermal_weights(nbar, n_levels)).astype(complex)


def plus_state(axis: str) -> np.ndarray:
    if axis == "x":
        return np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    if axis == "y":
        return np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2)
    raise ValueError(f"unknown axis {axis!r}")


def minus_state(axis: str) -> np.ndarray:
    if axis == "x":
        return np.array([1.0, -1.0], dtype=complex) / np.sqrt(2)
    if axis == "y":
        return np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2)
    raise ValueError(f"unknown axis {axis!r}")
