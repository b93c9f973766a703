"""Grover's unstructured search over N = 2^n elements with k marked items.

Sign convention: the oracle here is the reflection 2|w><w| - I, which flips
the sign of every UNMARKED amplitude. The more common oracle I - 2|w><w|
(flip marked) differs from it by an unobservable global factor of -1, and the
diffusion -(2|s><s| - I) absorbs the companion sign, so the composite iterate
G is the standard one either way: after m iterates the marked-set probability
is sin^2((2m+1)*phi) with sin(phi) = sqrt(k/N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qamp._backend import kernels as _k
from qamp.errors import DegenerateSearchError
from qamp.prep import hadamard_all
from qamp.rng import Seed, make_rng
from qamp.statevector import BasisPredicate, Statevector, as_predicate


@dataclass(frozen=True)
class GroverSetup:
    """A search instance: register width, marked set, and its rotation angle."""

    num_qubits: int
    marked: BasisPredicate
    k: int
    phi: float


def build_setup(num_qubits: int, marked) -> GroverSetup:
    pred = as_predicate(marked)
    n_states = 1 << num_qubits
    k = pred.count(num_qubits)
    if k < 1 or k >= n_states:
        raise DegenerateSearchError(f"marked count k={k} must satisfy 1 <= k < {n_states}")
    return GroverSetup(num_qubits, pred, k, math.asin(math.sqrt(k / n_states)))


class OracleReflection:
    """2|w><w| - I: flips the sign of every unmarked amplitude. Involution."""

    def __init__(self, pred):
        self.pred = as_predicate(pred)

    def apply(self, sv: Statevector) -> None:
        mask = self.pred.complement_mask(sv.num_qubits)
        k = int(sv.amplitudes.shape[0] - mask.sum())
        if k == 0 or k == sv.amplitudes.shape[0]:
            raise DegenerateSearchError("oracle needs a nonempty, non-universal marked set")
        _k.flip_signs(sv.amplitudes, mask)


class Diffusion:
    """-(2|s><s| - I) with |s> the uniform superposition: v -> v - 2*mean(v)."""

    def apply(self, sv: Statevector) -> None:
        _k.uniform_diffusion(sv.amplitudes)


def oracle_reflection(pred) -> OracleReflection:
    return OracleReflection(pred)


def diffusion(num_qubits: int) -> Diffusion:
    return Diffusion()


class GroverIterate:
    """G = D o O; each application rotates the search plane by 2*phi."""

    def __init__(self, setup: GroverSetup):
        self.setup = setup
        self._oracle = OracleReflection(setup.marked)
        self._diffusion = Diffusion()

    def apply(self, sv: Statevector, times: int = 1) -> None:
        for _ in range(times):
            self._oracle.apply(sv)
            self._diffusion.apply(sv)


def success_probability(phi: float, m: int) -> float:
    """Closed-form marked probability after m iterates."""
    return math.sin((2 * m + 1) * phi) ** 2


def optimal_iterations(n_states: int, k: int) -> int:
    """Iteration count maximizing the marked probability.

    Exact integer argmax of sin^2((2m+1)*phi) over m in [0, ceil(pi/(4*phi))+1];
    ties go to the smaller m. Correct for small N and any k, where rounding
    pi/(4*phi) - 1/2 can be off by one.
    """
    if not 1 <= k < n_states:
        raise DegenerateSearchError(f"need 1 <= k < N, got k={k}, N={n_states}")
    phi = math.asin(math.sqrt(k / n_states))
    m_hi = math.ceil(math.pi / (4.0 * phi)) + 1
    best_m, best_p = 0, success_probability(phi, 0)
    for m in range(1, m_hi + 1):
        p = success_probability(phi, m)
        if p > best_p + 1e-15:
            best_m, best_p = m, p
    return best_m


@dataclass(frozen=True)
class SearchResult:
    measured_index: int
    success: bool
    success_frequency: float
    iterations: int
    theoretical_success: float
    shots: int


def run_search(setup: GroverSetup, shots: int, seed: Seed | np.random.Generator) -> SearchResult:
    """Prepare |s>, apply G^m at the optimal m, and measure ``shots`` times.

    The first draw is reported as "the" measurement; the marked-set frequency
    over all shots estimates sin^2((2m+1)*phi).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = make_rng(seed)
    m = optimal_iterations(1 << setup.num_qubits, setup.k)
    sv = hadamard_all(setup.num_qubits).prepare()
    GroverIterate(setup).apply(sv, times=m)
    draws = sv.sample(shots, rng)
    mask = setup.marked.mask(setup.num_qubits)
    hits = int(mask[draws].sum())
    first = int(draws[0])
    return SearchResult(
        measured_index=first,
        success=bool(mask[first]),
        success_frequency=hits / shots,
        iterations=m,
        theoretical_success=success_probability(setup.phi, m),
        shots=shots,
    )
