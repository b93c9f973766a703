"""Dense complex statevector over an n-qubit register.

Conventions, fixed once for the whole package:

* Qubit 0 is the least-significant bit of the basis index (little-endian).
* Gates act in place over strided slices; no 2^n x 2^n matrix is ever built.
* The norm is checked after every mutating operation. Drift beyond
  ``NORM_TOL`` raises :class:`NormDriftError`; the state is never silently
  renormalized.
* Global phase is not tracked canonically: states equal up to global phase
  compare equal only through ``|<psi|phi>| = 1``.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence

import numpy as np

from qamp._backend import kernels as _k
from qamp.errors import NormDriftError, PermutationError
from qamp.gates import Gate
from qamp.rng import Seed, make_rng

NORM_TOL = 1e-10


class BasisPredicate:
    """Deterministic membership test over basis indices 0 .. 2^n - 1.

    Construct from an explicit index set, a qubit test, or any callable
    int -> bool. Boolean masks are built once per register width and cached.
    """

    def __init__(self, fn: Callable[[int], bool], name: str = "pred",
                 mask_builder: Callable[[int], np.ndarray] | None = None):
        self._fn = fn
        self._mask_builder = mask_builder
        self._masks: dict[int, np.ndarray] = {}
        self.name = name

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "BasisPredicate":
        idx = frozenset(int(i) for i in indices)

        def build(num_qubits: int) -> np.ndarray:
            mask = np.zeros(1 << num_qubits, dtype=np.uint8)
            for i in idx:
                mask[i] = 1
            return mask

        return cls(lambda i: i in idx, name=f"in({sorted(idx)})", mask_builder=build)

    @classmethod
    def qubit_is_one(cls, qubit: int) -> "BasisPredicate":
        def build(num_qubits: int) -> np.ndarray:
            n = 1 << num_qubits
            return (((np.arange(n) >> qubit) & 1)).astype(np.uint8)

        return cls(lambda i: (i >> qubit) & 1 == 1, name=f"q{qubit}=1", mask_builder=build)

    def __call__(self, index: int) -> bool:
        return bool(self._fn(index))

    def mask(self, num_qubits: int) -> np.ndarray:
        """uint8 mask of length 2^num_qubits; nonzero where the predicate holds."""
        got = self._masks.get(num_qubits)
        if got is None:
            if self._mask_builder is not None:
                got = np.ascontiguousarray(self._mask_builder(num_qubits), dtype=np.uint8)
            else:
                n = 1 << num_qubits
                got = np.fromiter((1 if self._fn(i) else 0 for i in range(n)),
                                  dtype=np.uint8, count=n)
            got.setflags(write=False)
            self._masks[num_qubits] = got
        return got

    def count(self, num_qubits: int) -> int:
        return int(self.mask(num_qubits).sum())

    def complement_mask(self, num_qubits: int) -> np.ndarray:
        return np.ascontiguousarray(1 - self.mask(num_qubits), dtype=np.uint8)

    def __repr__(self) -> str:
        return f"BasisPredicate({self.name})"


def as_predicate(pred) -> BasisPredicate:
    """Coerce a BasisPredicate, index collection, or callable to a predicate."""
    if isinstance(pred, BasisPredicate):
        return pred
    if isinstance(pred, (set, frozenset, list, tuple, range, np.ndarray)):
        return BasisPredicate.from_indices(pred)
    if callable(pred):
        return BasisPredicate(pred)
    raise TypeError(f"cannot interpret {pred!r} as a basis predicate")


class BasisPermutation:
    """A bijection on basis indices, validated at construction."""

    __slots__ = ("forward",)

    def __init__(self, forward: Sequence[int] | np.ndarray):
        fwd = np.ascontiguousarray(forward, dtype=np.int64)
        n = fwd.shape[0]
        seen = np.zeros(n, dtype=bool)
        if fwd.min(initial=0) < 0 or fwd.max(initial=-1) >= n:
            raise PermutationError("image out of range")
        seen[fwd] = True
        if not seen.all():
            raise PermutationError("map is not a bijection (duplicate images)")
        self.forward = fwd
        self.forward.setflags(write=False)

    @classmethod
    def identity(cls, num_states: int) -> "BasisPermutation":
        return cls(np.arange(num_states, dtype=np.int64))

    @classmethod
    def from_callable(cls, fn: Callable[[int], int], num_states: int) -> "BasisPermutation":
        return cls(np.fromiter((fn(i) for i in range(num_states)), dtype=np.int64,
                               count=num_states))

    @property
    def num_states(self) -> int:
        return int(self.forward.shape[0])

    def inverse(self) -> "BasisPermutation":
        inv = np.empty_like(self.forward)
        inv[self.forward] = np.arange(self.num_states, dtype=np.int64)
        return BasisPermutation(inv)

    def __call__(self, index: int) -> int:
        return int(self.forward[index])


class Statevector:
    """2^n complex amplitudes with in-place gate application."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int):
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        self.num_qubits = num_qubits
        self.amplitudes = np.zeros(1 << num_qubits, dtype=np.complex128)
        self.amplitudes[0] = 1.0

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex] | np.ndarray) -> "Statevector":
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        n = amps.shape[0]
        num_qubits = int(n).bit_length() - 1
        if n != (1 << num_qubits) or n < 2:
            raise ValueError(f"amplitude count {n} is not a power of two >= 2")
        sv = cls.__new__(cls)
        sv.num_qubits = num_qubits
        sv.amplitudes = amps.copy()
        sv._check_norm()
        return sv

    def copy(self) -> "Statevector":
        sv = Statevector.__new__(Statevector)
        sv.num_qubits = self.num_qubits
        sv.amplitudes = self.amplitudes.copy()
        return sv

    def norm_sq(self) -> float:
        return _k.norm_sq(self.amplitudes)

    def _check_norm(self) -> None:
        drift = abs(self.norm_sq() - 1.0)
        if not drift <= NORM_TOL:  # inverted so NaN amplitudes are caught too
            raise NormDriftError(f"norm drift {drift:.3e} exceeds {NORM_TOL:g}")

    def _check_target(self, target: int) -> None:
        if not 0 <= target < self.num_qubits:
            raise IndexError(f"qubit {target} out of range for {self.num_qubits}-qubit register")

    def apply_gate(self, gate: Gate, target: int) -> "Statevector":
        """Apply a single-qubit gate to ``target``; returns self."""
        self._check_target(target)
        m = gate.matrix
        _k.apply_gate_1q(self.amplitudes, m[0, 0], m[0, 1], m[1, 0], m[1, 1], target)
        self._check_norm()
        return self

    def apply_controlled_gate(self, gate: Gate, controls: Iterable[int], target: int) -> "Statevector":
        """Apply ``gate`` on ``target`` where every control qubit is 1."""
        controls = tuple(controls)
        self._check_target(target)
        mask = 0
        for c in controls:
            self._check_target(c)
            if c == target:
                raise ValueError(f"control {c} overlaps target")
            mask |= 1 << c
        m = gate.matrix
        _k.apply_gate_1q_controlled(self.amplitudes, m[0, 0], m[0, 1], m[1, 0], m[1, 1],
                                    target, mask)
        self._check_norm()
        return self

    def apply_permutation(self, perm: BasisPermutation) -> "Statevector":
        """Move the amplitude at index i to perm(i)."""
        if perm.num_states != self.amplitudes.shape[0]:
            raise PermutationError("permutation size does not match register")
        _k.apply_permutation(self.amplitudes, perm.forward)
        self._check_norm()
        return self

    def apply_conditional_ry(self, angles: np.ndarray, register: Sequence[int],
                             target: int) -> "Statevector":
        """Rotate ``target`` by Ry(angles[v]), v = integer value of ``register``.

        ``register[b]`` is the qubit holding bit b of v; ``angles`` must have
        2^len(register) entries.
        """
        register = tuple(register)
        self._check_target(target)
        for q in register:
            self._check_target(q)
            if q == target:
                raise ValueError(f"register qubit {q} overlaps target")
        angles = np.ascontiguousarray(angles, dtype=np.float64)
        if angles.shape[0] != (1 << len(register)):
            raise ValueError("need one angle per register value")
        reg = np.ascontiguousarray(register, dtype=np.int64)
        _k.apply_value_ctrl_ry(self.amplitudes, angles, reg, target)
        self._check_norm()
        return self

    def probability_of(self, pred) -> float:
        """Sum of |amplitude|^2 over basis indices satisfying ``pred``."""
        mask = as_predicate(pred).mask(self.num_qubits)
        return _k.masked_probability(self.amplitudes, mask)

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real * a.real + a.imag * a.imag

    def sample(self, shots: int, seed: Seed | np.random.Generator) -> np.ndarray:
        """Draw ``shots`` i.i.d. basis indices from the Born distribution."""
        if shots < 1:
            raise ValueError("shots must be >= 1")
        rng = make_rng(seed)
        p = self.probabilities()
        p = p / p.sum()
        return rng.choice(p.shape[0], size=shots, p=p)
