"""Composable state-preparation recipes.

A :class:`StatePreparation` is an ordered list of exactly invertible
operations (gates, controlled gates, basis permutations, value-conditioned
rotations) over a fixed register width. Applying it to |0...0> produces the
target superposition; ``apply_inverse`` runs the exact adjoint, which is what
the diffusion reflection A (2|0><0| - I) A† needs.

``distribution_loader`` builds the standard binary tree of conditional Ry
rotations that loads any nonnegative real amplitude profile sqrt(q(x))
exactly: bit t of the value register is rotated by the conditional
probability of being 1 given the already-loaded higher bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from qamp.gates import Gate, hadamard, rot_y
from qamp.statevector import BasisPermutation, Statevector


class Operation(Protocol):
    def apply(self, sv: Statevector) -> None: ...

    def inverted(self) -> "Operation": ...


@dataclass(frozen=True)
class GateOp:
    gate: Gate
    target: int

    def apply(self, sv: Statevector) -> None:
        sv.apply_gate(self.gate, self.target)

    def inverted(self) -> "GateOp":
        return GateOp(self.gate.dagger(), self.target)


@dataclass(frozen=True)
class ControlledGateOp:
    gate: Gate
    controls: tuple[int, ...]
    target: int

    def apply(self, sv: Statevector) -> None:
        sv.apply_controlled_gate(self.gate, self.controls, self.target)

    def inverted(self) -> "ControlledGateOp":
        return ControlledGateOp(self.gate.dagger(), self.controls, self.target)


@dataclass(frozen=True)
class PermutationOp:
    perm: BasisPermutation

    def apply(self, sv: Statevector) -> None:
        sv.apply_permutation(self.perm)

    def inverted(self) -> "PermutationOp":
        return PermutationOp(self.perm.inverse())


class ConditionalRyOp:
    """Ry on ``target`` with an angle chosen by the value of ``register``."""

    __slots__ = ("angles", "register", "target")

    def __init__(self, angles: np.ndarray, register: tuple[int, ...], target: int):
        self.angles = np.ascontiguousarray(angles, dtype=np.float64)
        self.register = tuple(register)
        self.target = target

    def apply(self, sv: Statevector) -> None:
        sv.apply_conditional_ry(self.angles, self.register, self.target)

    def inverted(self) -> "ConditionalRyOp":
        return ConditionalRyOp(-self.angles, self.register, self.target)


class StatePreparation:
    """A unitary recipe mapping |0...0> to a target superposition."""

    def __init__(self, num_qubits: int, ops: Sequence[Operation] = ()):
        self.num_qubits = num_qubits
        self.ops = list(ops)

    def apply(self, sv: Statevector) -> None:
        if sv.num_qubits != self.num_qubits:
            raise ValueError("register width mismatch")
        for op in self.ops:
            op.apply(sv)

    def apply_inverse(self, sv: Statevector) -> None:
        if sv.num_qubits != self.num_qubits:
            raise ValueError("register width mismatch")
        for op in reversed(self.ops):
            op.inverted().apply(sv)

    def prepare(self) -> Statevector:
        sv = Statevector(self.num_qubits)
        self.apply(sv)
        return sv

    def then(self, *ops: Operation) -> "StatePreparation":
        return StatePreparation(self.num_qubits, self.ops + list(ops))


def hadamard_all(num_qubits: int) -> StatePreparation:
    """Uniform superposition over all 2^n basis states."""
    h = hadamard()
    return StatePreparation(num_qubits, [GateOp(h, q) for q in range(num_qubits)])


def bernoulli_prep(p: float) -> StatePreparation:
    """One qubit carrying sqrt(1-p)|0> + sqrt(p)|1>."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    theta = 2.0 * math.asin(math.sqrt(p))
    return StatePreparation(1, [GateOp(rot_y(theta), 0)])


def distribution_loader(probs: np.ndarray, qubits: Sequence[int]) -> list[ConditionalRyOp]:
    """Ops loading amplitudes sqrt(probs[v]) onto the value of ``qubits``.

    ``qubits[b]`` holds bit b of the value. Probabilities must be nonnegative;
    they are used as-is (the caller normalizes). One conditional rotation is
    emitted per bit, conditioned on all higher bits.
    """
    qubits = tuple(qubits)
    r = len(qubits)
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape[0] != (1 << r):
        raise ValueError("need one probability per register value")
    if np.any(probs < 0):
        raise ValueError("negative probability")
    ops: list[ConditionalRyOp] = []
    for t in range(r - 1, -1, -1):
        # group outcomes by the value of bits above t; split each group on bit t
        grouped = probs.reshape(1 << (r - 1 - t), 2, 1 << t).sum(axis=2)
        s0, s1 = grouped[:, 0], grouped[:, 1]
        tot = s0 + s1
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(tot > 0.0, s1 / tot, 0.0)
        angles = 2.0 * np.arcsin(np.sqrt(np.clip(cond, 0.0, 1.0)))
        ops.append(ConditionalRyOp(angles, qubits[t + 1:], qubits[t]))
    return ops


def load_distribution(probs: np.ndarray) -> StatePreparation:
    """StatePreparation for sqrt(probs[x])|x> over a minimal register."""
    n = int(np.asarray(probs).shape[0])
    num_qubits = max(1, (n - 1).bit_length())
    if n != (1 << num_qubits):
        raise ValueError("length must be a power of two")
    return StatePreparation(num_qubits, distribution_loader(probs, range(num_qubits)))
