"""Seeded random number generation.

All randomness in the package flows through numpy's PCG64 generator. A seed
is a 64-bit unsigned integer (seed 0 is valid); identical seeds give
bit-identical sample streams on every platform numpy supports. Independent
child streams (e.g. one per dyadic layer) are derived deterministically from
the root seed with ``numpy.random.SeedSequence.spawn``, so results do not
depend on execution order.
"""

from __future__ import annotations

import numpy as np

Seed = int


def make_rng(seed: Seed | np.random.Generator) -> np.random.Generator:
    """Return a PCG64 generator for ``seed``, or pass a generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def spawn_rngs(seed: Seed, n: int) -> list[np.random.Generator]:
    """Derive ``n`` independent generators deterministically from ``seed``."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(int(seed)).spawn(n)]
