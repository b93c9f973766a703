import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, num_qubits):
    """A Haar-ish random normalized statevector as a raw array."""
    n = 1 << num_qubits
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return np.ascontiguousarray(v / np.linalg.norm(v), dtype=np.complex128)
