import numpy as np
import pytest

from qamp.prep import bernoulli_prep, distribution_loader, hadamard_all, load_distribution
from qamp.statevector import Statevector


def test_hadamard_all_is_uniform():
    sv = hadamard_all(3).prepare()
    np.testing.assert_allclose(sv.amplitudes, np.full(8, 1 / np.sqrt(8)), atol=1e-15)


@pytest.mark.parametrize("p", [0.0, 0.15, 0.5, 0.97, 1.0])
def test_bernoulli_prep_hits_target_probability(p):
    sv = bernoulli_prep(p).prepare()
    assert sv.probability_of({1}) == pytest.approx(p, abs=1e-14)


def test_loader_reproduces_sqrt_weights_exactly(rng):
    for bits in range(1, 9):
        q = rng.uniform(size=1 << bits)
        q /= q.sum()
        sv = load_distribution(q).prepare()
        np.testing.assert_allclose(sv.amplitudes, np.sqrt(q), atol=1e-13)


def test_loader_handles_zero_mass_regions(rng):
    q = np.array([0.0, 0.0, 0.3, 0.0, 0.7, 0.0, 0.0, 0.0])
    sv = load_distribution(q).prepare()
    np.testing.assert_allclose(sv.amplitudes, np.sqrt(q), atol=1e-15)


def test_apply_inverse_returns_to_zero_state(rng):
    q = rng.uniform(size=16)
    q /= q.sum()
    prep = load_distribution(q)
    sv = prep.prepare()
    prep.apply_inverse(sv)
    expected = np.zeros(16)
    expected[0] = 1.0
    np.testing.assert_allclose(sv.amplitudes, expected, atol=1e-12)


def test_loader_on_offset_qubits(rng):
    # load a 2-bit distribution into qubits 1 and 2 of a 3-qubit register
    q = np.array([0.1, 0.2, 0.3, 0.4])
    ops = distribution_loader(q, qubits=(1, 2))
    sv = Statevector(3)
    for op in ops:
        op.apply(sv)
    probs = sv.probabilities()
    grouped = probs.reshape(4, 2).sum(axis=1)  # marginal over qubit 0
    np.testing.assert_allclose(grouped, q, atol=1e-14)
