import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qamp.errors import GateUnitarityError, NormDriftError, PermutationError
from qamp.gates import Gate, hadamard, pauli_x, pauli_y, pauli_z, phase, rot_y, rot_z
from qamp.statevector import BasisPermutation, BasisPredicate, Statevector

SQ2 = 1.0 / math.sqrt(2.0)


class TestGates:
    def test_x_flips_zero(self):
        sv = Statevector(1).apply_gate(pauli_x(), 0)
        np.testing.assert_allclose(sv.amplitudes, [0, 1])

    def test_hadamard_makes_equal_superposition(self):
        sv = Statevector(1).apply_gate(hadamard(), 0)
        np.testing.assert_allclose(sv.amplitudes, [SQ2, SQ2], atol=1e-15)

    def test_z_flips_phase_of_one(self):
        sv = Statevector.from_amplitudes([SQ2, SQ2]).apply_gate(pauli_z(), 0)
        np.testing.assert_allclose(sv.amplitudes, [SQ2, -SQ2], atol=1e-15)

    def test_all_named_gates_are_unitary(self):
        for g in (pauli_x(), pauli_y(), pauli_z(), hadamard(),
                  rot_y(0.7), rot_z(1.3), phase(2.2)):
            defect = np.max(np.abs(g.matrix @ g.matrix.conj().T - np.eye(2)))
            assert defect <= 1e-12

    def test_non_unitary_matrix_rejected(self):
        with pytest.raises(GateUnitarityError):
            Gate("bad", [[1, 0], [0, 1.001]])

    def test_target_out_of_range(self):
        with pytest.raises(IndexError):
            Statevector(2).apply_gate(pauli_x(), 2)

    def test_gate_on_middle_qubit_strides_correctly(self):
        # X on qubit 1 of |000> gives |010> = index 2
        sv = Statevector(3).apply_gate(pauli_x(), 1)
        assert sv.amplitudes[2] == 1.0


class TestControlled:
    def test_cnot_flips_when_control_set(self):
        sv = Statevector(2).apply_gate(pauli_x(), 0)  # index 1
        sv.apply_controlled_gate(pauli_x(), [0], 1)
        np.testing.assert_allclose(sv.amplitudes, [0, 0, 0, 1])

    def test_cnot_no_op_when_control_clear(self):
        sv = Statevector(2)
        sv.apply_controlled_gate(pauli_x(), [0], 1)
        np.testing.assert_allclose(sv.amplitudes, [1, 0, 0, 0])

    def test_controlled_roty_rotates_target(self):
        sv = Statevector(2).apply_gate(pauli_x(), 0)
        sv.apply_controlled_gate(rot_y(math.pi / 2), [0], 1)
        expected = np.zeros(4)
        expected[1] = math.cos(math.pi / 4)
        expected[3] = math.sin(math.pi / 4)
        np.testing.assert_allclose(sv.amplitudes, expected, atol=1e-15)

    def test_overlapping_control_and_target_rejected(self):
        with pytest.raises(ValueError):
            Statevector(2).apply_controlled_gate(pauli_x(), [1], 1)


class TestPermutation:
    def test_identity(self):
        sv = Statevector.from_amplitudes([0.5, 0.5, 0.5, 0.5])
        sv.apply_permutation(BasisPermutation.identity(4))
        np.testing.assert_array_equal(sv.amplitudes, [0.5, 0.5, 0.5, 0.5])

    def test_transposition(self):
        a, b = 0.6, 0.8
        sv = Statevector.from_amplitudes([a, b, 0, 0])
        sv.apply_permutation(BasisPermutation([1, 0, 2, 3]))
        np.testing.assert_array_equal(sv.amplitudes, [b, a, 0, 0])

    def test_non_bijective_rejected(self):
        with pytest.raises(PermutationError):
            BasisPermutation([0, 0, 1, 2])

    def test_round_trip_is_exact(self, rng):
        from conftest import random_state
        sv = Statevector.from_amplitudes(random_state(rng, 4))
        before = sv.amplitudes.copy()
        perm = BasisPermutation(rng.permutation(16))
        sv.apply_permutation(perm)
        sv.apply_permutation(perm.inverse())
        np.testing.assert_array_equal(sv.amplitudes, before)


class TestPredicatesAndProbability:
    def test_single_index_on_uniform(self):
        sv = Statevector.from_amplitudes([0.5] * 4)
        assert sv.probability_of({3}) == pytest.approx(0.25, abs=1e-15)

    def test_full_set_is_normalization(self):
        sv = Statevector.from_amplitudes([0.5] * 4)
        assert sv.probability_of(range(4)) == pytest.approx(1.0, abs=1e-12)

    def test_h_state_measures_one_half_the_time(self):
        sv = Statevector(1).apply_gate(hadamard(), 0)
        assert sv.probability_of({1}) == pytest.approx(0.5, abs=1e-15)

    def test_predicate_is_deterministic(self):
        pred = BasisPredicate(lambda i: i % 3 == 0)
        assert [pred(i) for i in range(9)] == [pred(i) for i in range(9)]
        np.testing.assert_array_equal(pred.mask(3), pred.mask(3))

    def test_qubit_is_one_mask(self):
        mask = BasisPredicate.qubit_is_one(1).mask(2)
        np.testing.assert_array_equal(mask, [0, 0, 1, 1])


class TestSampling:
    def test_deterministic_state_always_hits(self):
        sv = Statevector(1).apply_gate(pauli_x(), 0)
        draws = sv.sample(100, seed=0)
        assert (draws == 1).all()

    def test_h_state_frequency_within_3_sigma(self):
        sv = Statevector(1).apply_gate(hadamard(), 0)
        shots = 10**5
        draws = sv.sample(shots, seed=42)
        freq = (draws == 1).mean()
        sigma = math.sqrt(0.25 / shots)
        assert abs(freq - 0.5) <= 3 * sigma

    def test_identical_seed_identical_stream(self):
        sv = Statevector(3)
        sv.apply_gate(hadamard(), 0).apply_gate(hadamard(), 1).apply_gate(hadamard(), 2)
        np.testing.assert_array_equal(sv.sample(1000, seed=7), sv.sample(1000, seed=7))

    def test_measurement_frequency_tracks_probability(self, rng):
        from conftest import random_state
        sv = Statevector.from_amplitudes(random_state(rng, 4))
        pred = BasisPredicate(lambda i: i % 3 == 1)
        p = sv.probability_of(pred)
        shots = 10**5
        draws = sv.sample(shots, seed=11)
        freq = pred.mask(4)[draws].mean()
        assert abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / shots)


class TestNormDiscipline:
    def test_from_amplitudes_rejects_unnormalized(self):
        with pytest.raises(NormDriftError):
            Statevector.from_amplitudes([1.0, 0.5])

    def test_norm_preserved_under_long_gate_sequences(self, rng):
        sv = Statevector(5)
        gates = [pauli_x(), pauli_y(), pauli_z(), hadamard(), rot_y(0.3), rot_z(1.1)]
        for _ in range(200):
            sv.apply_gate(gates[int(rng.integers(len(gates)))], int(rng.integers(5)))
        assert abs(sv.norm_sq() - 1.0) <= 1e-10


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 5)), min_size=1, max_size=60))
def test_gate_sequences_preserve_norm_property(moves):
    gates = [hadamard(), rot_y(0.71), rot_z(2.1), phase(0.9), pauli_x(), pauli_y()]
    sv = Statevector(4)
    for target, gate_idx in moves:
        sv.apply_gate(gates[gate_idx], target)
    assert abs(sv.norm_sq() - 1.0) <= 1e-10


@settings(max_examples=30, derandomize=True, deadline=None)
@given(st.permutations(list(range(8))))
def test_permutation_round_trip_property(perm_list):
    amps = np.arange(1, 9, dtype=np.complex128)
    amps /= np.linalg.norm(amps)
    sv = Statevector.from_amplitudes(amps)
    before = sv.amplitudes.copy()
    perm = BasisPermutation(perm_list)
    sv.apply_permutation(perm)
    sv.apply_permutation(perm.inverse())
    np.testing.assert_array_equal(sv.amplitudes, before)


def test_seed_range_is_validated():
    from qamp.rng import make_rng

    with pytest.raises(ValueError):
        make_rng(-1)
    with pytest.raises(ValueError):
        make_rng(2**64)
    make_rng(0)  # zero is a valid seed


class TestAgainstDenseMatrices:
    """Differential checks: strided kernels vs explicit Kronecker matrices."""

    @staticmethod
    def dense_single(num_qubits, u, target):
        eye_low = np.eye(1 << target)
        eye_high = np.eye(1 << (num_qubits - target - 1))
        return np.kron(eye_high, np.kron(u, eye_low))

    @staticmethod
    def dense_controlled(num_qubits, u, controls, target):
        n = 1 << num_qubits
        mat = np.eye(n, dtype=complex)
        ctrl_mask = sum(1 << c for c in controls)
        for i0 in range(n):
            if (i0 >> target) & 1 or (i0 & ctrl_mask) != ctrl_mask:
                continue
            i1 = i0 | (1 << target)
            mat[i0, i0], mat[i0, i1] = u[0, 0], u[0, 1]
            mat[i1, i0], mat[i1, i1] = u[1, 0], u[1, 1]
        return mat

    @staticmethod
    def dense_conditional_ry(num_qubits, angles, register, target):
        n = 1 << num_qubits
        mat = np.eye(n, dtype=complex)
        for i0 in range(n):
            if (i0 >> target) & 1:
                continue
            v = sum(((i0 >> q) & 1) << b for b, q in enumerate(register))
            c, s = math.cos(angles[v] / 2), math.sin(angles[v] / 2)
            i1 = i0 | (1 << target)
            mat[i0, i0], mat[i0, i1] = c, -s
            mat[i1, i0], mat[i1, i1] = s, c
        return mat

    def test_single_qubit_gates_match_dense(self, rng):
        from conftest import random_state
        for g in (hadamard(), rot_y(0.9), rot_z(2.3), phase(1.1)):
            for nq in (1, 3, 5):
                for target in range(nq):
                    amps = random_state(rng, nq)
                    expected = self.dense_single(nq, g.matrix, target) @ amps
                    sv = Statevector.from_amplitudes(amps)
                    sv.apply_gate(g, target)
                    np.testing.assert_allclose(sv.amplitudes, expected, atol=1e-13)

    def test_controlled_gates_match_dense(self, rng):
        from conftest import random_state
        for _ in range(15):
            nq = int(rng.integers(2, 6))
            order = [int(q) for q in rng.permutation(nq)]
            target, controls = order[0], tuple(order[1:1 + int(rng.integers(1, nq))])
            g = rot_y(float(rng.uniform(0, 3)))
            amps = random_state(rng, nq)
            expected = self.dense_controlled(nq, g.matrix, controls, target) @ amps
            sv = Statevector.from_amplitudes(amps)
            sv.apply_controlled_gate(g, controls, target)
            np.testing.assert_allclose(sv.amplitudes, expected, atol=1e-13)

    def test_conditional_rotation_matches_dense(self, rng):
        from conftest import random_state
        for _ in range(15):
            nq = int(rng.integers(2, 6))
            order = [int(q) for q in rng.permutation(nq)]
            target = order[0]
            register = tuple(sorted(order[1:1 + int(rng.integers(1, nq))]))
            angles = rng.uniform(0, math.pi, size=1 << len(register))
            amps = random_state(rng, nq)
            expected = self.dense_conditional_ry(nq, angles, register, target) @ amps
            sv = Statevector.from_amplitudes(amps)
            sv.apply_conditional_ry(angles, register, target)
            np.testing.assert_allclose(sv.amplitudes, expected, atol=1e-13)


def test_nan_amplitudes_rejected():
    with pytest.raises(NormDriftError):
        Statevector.from_amplitudes([float("nan"), 0.0])
    with pytest.raises(GateUnitarityError):
        Gate("nan", [[float("nan"), 0], [0, 1]])
