"""Single-qubit gates as validated 2x2 unitary matrices.

Every constructor checks ``U U^dagger = I`` entrywise within
``UNITARITY_TOL`` and raises :class:`GateUnitarityError` otherwise. The
rotation set {RotY, RotZ, Phase} together with a phase shift is enough to
express any single-qubit unitary (Euler decomposition); no automatic
decomposer is provided.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from qamp.errors import GateUnitarityError

UNITARITY_TOL = 1e-12

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class Gate:
    """An immutable named 2x2 unitary."""

    __slots__ = ("name", "matrix")

    def __init__(self, name: str, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (2, 2):
            raise GateUnitarityError(f"gate {name!r} must be 2x2, got {matrix.shape}")
        defect = np.max(np.abs(matrix @ matrix.conj().T - np.eye(2)))
        if not defect <= UNITARITY_TOL:  # inverted so NaN entries are caught too
            raise GateUnitarityError(f"gate {name!r} is not unitary (defect {defect:.3e})")
        self.name = name
        self.matrix = matrix
        self.matrix.setflags(write=False)

    def dagger(self) -> "Gate":
        return Gate(self.name + "†", self.matrix.conj().T)

    def __repr__(self) -> str:
        return f"Gate({self.name})"


def pauli_x() -> Gate:
    return Gate("X", [[0, 1], [1, 0]])


def pauli_y() -> Gate:
    return Gate("Y", [[0, -1j], [1j, 0]])


def pauli_z() -> Gate:
    return Gate("Z", [[1, 0], [0, -1]])


def hadamard() -> Gate:
    return Gate("H", [[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]])


def rot_y(theta: float) -> Gate:
    """exp(-i*theta*Y/2): a real rotation of the Bloch sphere about Y."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return Gate(f"Ry({theta:g})", [[c, -s], [s, c]])


def rot_z(phi: float) -> Gate:
    """exp(-i*phi*Z/2)."""
    e = cmath.exp(-0.5j * phi)
    return Gate(f"Rz({phi:g})", [[e, 0], [0, e.conjugate()]])


def phase(alpha: float) -> Gate:
    """diag(1, exp(i*alpha))."""
    return Gate(f"P({alpha:g})", [[1, 0], [0, cmath.exp(1j * alpha)]])
