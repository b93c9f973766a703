import math

import numpy as np
import pytest

from qamp.errors import DegenerateSearchError
from qamp.grover import (
    Diffusion,
    GroverIterate,
    OracleReflection,
    build_setup,
    optimal_iterations,
    run_search,
    success_probability,
)
from qamp.prep import hadamard_all
from qamp.statevector import Statevector


def reflection_matrix(n, marked):
    """Independent oracle: the dense matrix 2|w><w| - I for the marked set."""
    proj = np.zeros((n, n))
    for i in marked:
        proj[i, i] = 1.0
    return 2 * proj - np.eye(n)


class TestOracle:
    def test_matches_dense_reflection_on_uniform(self):
        sv = Statevector.from_amplitudes([0.5] * 4)
        OracleReflection({3}).apply(sv)
        expected = reflection_matrix(4, {3}) @ np.full(4, 0.5)
        np.testing.assert_allclose(sv.amplitudes, expected, atol=1e-15)
        np.testing.assert_allclose(sv.amplitudes, [-0.5, -0.5, -0.5, 0.5], atol=1e-15)

    def test_involution(self, rng):
        from conftest import random_state
        sv = Statevector.from_amplitudes(random_state(rng, 3))
        before = sv.amplitudes.copy()
        oracle = OracleReflection({1, 6})
        oracle.apply(sv)
        oracle.apply(sv)
        np.testing.assert_array_equal(sv.amplitudes, before)

    def test_marked_support_is_fixed_up_to_global_phase(self):
        sv = Statevector.from_amplitudes([0, 0.6, 0, 0.8])
        OracleReflection({1, 3}).apply(sv)
        overlap = abs(np.vdot([0, 0.6, 0, 0.8], sv.amplitudes))
        assert overlap == pytest.approx(1.0, abs=1e-12)

    def test_empty_and_universal_sets_rejected(self):
        sv = Statevector.from_amplitudes([0.5] * 4)
        with pytest.raises(DegenerateSearchError):
            OracleReflection(set()).apply(sv)
        with pytest.raises(DegenerateSearchError):
            OracleReflection({0, 1, 2, 3}).apply(sv)


class TestDiffusion:
    def test_uniform_state_maps_to_its_negative(self):
        sv = Statevector.from_amplitudes([0.5] * 4)
        Diffusion().apply(sv)
        np.testing.assert_allclose(sv.amplitudes, [-0.5] * 4, atol=1e-15)

    def test_orthogonal_vector_unchanged(self):
        v = np.array([1, -1, 1, -1], dtype=np.complex128) / 2
        sv = Statevector.from_amplitudes(v)
        Diffusion().apply(sv)
        np.testing.assert_allclose(sv.amplitudes, v, atol=1e-15)

    def test_one_iterate_fully_amplifies_quarter_case(self):
        # N=4, k=1: phi=pi/6 so one iterate reaches sin^2(pi/2) = 1
        setup = build_setup(2, {3})
        sv = hadamard_all(2).prepare()
        GroverIterate(setup).apply(sv)
        assert sv.probability_of({3}) == pytest.approx(1.0, abs=1e-12)

    def test_double_application_restores_state(self, rng):
        from conftest import random_state
        sv = Statevector.from_amplitudes(random_state(rng, 3))
        before = sv.amplitudes.copy()
        d = Diffusion()
        d.apply(sv)
        d.apply(sv)
        np.testing.assert_allclose(sv.amplitudes, before, atol=1e-12)


class TestOptimalIterations:
    def test_quarter_marked_single_step(self):
        assert optimal_iterations(4, 1) == 1

    def test_large_search_space(self):
        # independent scan of the closed form
        phi = math.asin(2**-10)
        best = max(range(900), key=lambda m: math.sin((2 * m + 1) * phi) ** 2)
        assert best == 804
        assert optimal_iterations(2**20, 1) == 804

    def test_half_marked_tie_breaks_to_zero(self):
        # phi=pi/4: sin^2(pi/4) = sin^2(3pi/4) = 1/2; enumeration confirms the tie
        vals = [math.sin((2 * m + 1) * math.pi / 4) ** 2 for m in range(3)]
        assert vals[0] == pytest.approx(vals[1], abs=1e-12)
        assert optimal_iterations(4, 2) == 0

    def test_degenerate_counts_rejected(self):
        with pytest.raises(DegenerateSearchError):
            optimal_iterations(4, 4)
        with pytest.raises(DegenerateSearchError):
            optimal_iterations(4, 0)


class TestRunSearch:
    def test_exact_case_always_succeeds(self):
        result = run_search(build_setup(2, {3}), shots=200, seed=3)
        assert result.success_frequency == 1.0
        assert result.success
        assert result.measured_index == 3

    def test_frequency_matches_closed_form_n256(self):
        setup = build_setup(8, {17})
        shots = 10**4
        result = run_search(setup, shots=shots, seed=5)
        p = success_probability(math.asin(1 / 16), result.iterations)
        assert result.theoretical_success == pytest.approx(p, abs=1e-12)
        sigma = math.sqrt(p * (1 - p) / shots)
        assert abs(result.success_frequency - p) <= 3 * sigma

    def test_two_element_search_cannot_amplify(self):
        result = run_search(build_setup(1, {1}), shots=4000, seed=9)
        assert result.iterations == 0
        assert result.theoretical_success == pytest.approx(0.5, abs=1e-12)
        assert abs(result.success_frequency - 0.5) <= 3 * math.sqrt(0.25 / 4000)


class TestRotationGeometry:
    @pytest.mark.parametrize("n,k", [(3, 1), (5, 2), (7, 11), (10, 256)])
    def test_rotation_law(self, n, k):
        marked = set(range(k))
        setup = build_setup(n, marked)
        sv = hadamard_all(n).prepare()
        iterate = GroverIterate(setup)
        for m in range(51):
            expected = success_probability(setup.phi, m)
            assert sv.probability_of(setup.marked) == pytest.approx(expected, abs=1e-10)
            iterate.apply(sv)

    def test_state_stays_in_two_dimensional_plane(self):
        n, marked = 5, {3, 17, 30}
        setup = build_setup(n, marked)
        mask = setup.marked.mask(n).astype(bool)
        omega = np.where(mask, 1.0, 0.0) / math.sqrt(len(marked))
        s_prime = np.where(mask, 0.0, 1.0) / math.sqrt((1 << n) - len(marked))
        sv = hadamard_all(n).prepare()
        iterate = GroverIterate(setup)
        for _ in range(25):
            iterate.apply(sv)
            residual = sv.amplitudes - np.vdot(omega, sv.amplitudes) * omega \
                - np.vdot(s_prime, sv.amplitudes) * s_prime
            assert np.linalg.norm(residual) <= 1e-10

    def test_iteration_count_scales_as_quarter_pi_root_n(self):
        for n in range(4, 21):
            ratio = optimal_iterations(2**n, 1) / math.sqrt(2**n)
            if n == 20:
                assert abs(ratio - math.pi / 4) / (math.pi / 4) <= 0.05
        assert abs(optimal_iterations(2**20, 1) / 2**10 - math.pi / 4) / (math.pi / 4) <= 0.05
