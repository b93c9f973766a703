# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector hot kernels.

Mirror of qamp._kernels_py with identical signatures; see that module for
the contracts. Arrays are 1-D C-contiguous complex128, mutated in place.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

COMPILED = True


def apply_gate_1q(double complex[::1] amps, double complex m00, double complex m01,
                  double complex m10, double complex m11, int target):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t step = 1 << target
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base, i, i0, i1
    cdef double complex a0, a1
    for base in range(0, n, block):
        for i in range(step):
            i0 = base + i
            i1 = i0 + step
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = m00 * a0 + m01 * a1
            amps[i1] = m10 * a0 + m11 * a1


def apply_gate_1q_controlled(double complex[::1] amps, double complex m00, double complex m01,
                             double complex m10, double complex m11, int target,
                             long long ctrl_mask):
    cdef Py_ssize_t n = amps.shape[0]
    cdef long long tbit = 1 << target
    cdef long long sel = ctrl_mask | tbit
    cdef Py_ssize_t i
    cdef double complex a0, a1
    for i in range(n):
        if (i & sel) == ctrl_mask:
            a0 = amps[i]
            a1 = amps[i + tbit]
            amps[i] = m00 * a0 + m01 * a1
            amps[i + tbit] = m10 * a0 + m11 * a1


def apply_value_ctrl_ry(double complex[::1] amps, const double[::1] angles,
                        const long long[::1] reg_qubits, int target):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t npairs = n >> 1
    cdef Py_ssize_t tmask = (1 << target) - 1
    cdef Py_ssize_t step = 1 << target
    cdef Py_ssize_t nreg = reg_qubits.shape[0]
    cdef Py_ssize_t k, i0, i1, b
    cdef long long v
    cdef double c, s
    cdef double complex a0, a1
    for k in range(npairs):
        i0 = ((k >> target) << (target + 1)) | (k & tmask)
        i1 = i0 + step
        v = 0
        for b in range(nreg):
            v |= ((i0 >> reg_qubits[b]) & 1) << b
        c = cos(0.5 * angles[v])
        s = sin(0.5 * angles[v])
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = c * a0 - s * a1
        amps[i1] = s * a0 + c * a1


def apply_permutation(double complex[::1] amps, const long long[::1] perm):
    cdef Py_ssize_t n = amps.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(n):
        out[perm[i]] = amps[i]
    for i in range(n):
        amps[i] = out[i]


def flip_signs(double complex[::1] amps, const unsigned char[::1] mask):
    cdef Py_ssize_t i
    for i in range(amps.shape[0]):
        if mask[i]:
            amps[i] = -amps[i]


def masked_probability(double complex[::1] amps, const unsigned char[::1] mask):
    cdef double total = 0.0
    cdef double complex a
    cdef Py_ssize_t i
    for i in range(amps.shape[0]):
        if mask[i]:
            a = amps[i]
            total += a.real * a.real + a.imag * a.imag
    return total


def uniform_diffusion(double complex[::1] amps):
    cdef Py_ssize_t n = amps.shape[0]
    cdef double complex acc = 0
    cdef Py_ssize_t i
    for i in range(n):
        acc = acc + amps[i]
    cdef double complex shift = 2.0 * acc / <double>n
    for i in range(n):
        amps[i] = amps[i] - shift


def norm_sq(double complex[::1] amps):
    cdef double total = 0.0
    cdef double complex a
    cdef Py_ssize_t i
    for i in range(amps.shape[0]):
        a = amps[i]
        total += a.real * a.real + a.imag * a.imag
    return total
