"""Pure-numpy implementation of the statevector hot kernels.

This is the fallback selected at import time when the compiled extension
(``qamp._kernels``) is unavailable or ``QAMP_PURE_PYTHON`` is set. Both
backends expose the same functions over 1-D C-contiguous complex128 arrays
and mutate in place.

Index convention everywhere: qubit ``t`` is bit ``t`` of the basis index
(little-endian).
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def apply_gate_1q(amps, m00, m01, m10, m11, target):
    """Multiply the 2x2 matrix [[m00,m01],[m10,m11]] into qubit ``target``."""
    step = 1 << target
    view = amps.reshape(-1, 2, step)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = m00 * a0 + m01 * a1
    view[:, 1, :] = m10 * a0 + m11 * a1


def apply_gate_1q_controlled(amps, m00, m01, m10, m11, target, ctrl_mask):
    """Apply the 2x2 matrix on ``target`` only where all ``ctrl_mask`` bits are 1."""
    n = amps.shape[0]
    tbit = 1 << target
    idx = np.arange(n, dtype=np.int64)
    i0 = idx[(idx & (ctrl_mask | tbit)) == ctrl_mask]
    i1 = i0 + tbit
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = m00 * a0 + m01 * a1
    amps[i1] = m10 * a0 + m11 * a1


def _pair_bases(n, target):
    # basis indices with the target bit clear, one per amplitude pair
    k = np.arange(n >> 1, dtype=np.int64)
    low = k & ((1 << target) - 1)
    return ((k >> target) << (target + 1)) | low


def apply_value_ctrl_ry(amps, angles, reg_qubits, target):
    """Rotate ``target`` by Ry(angles[v]) where v is the value of ``reg_qubits``.

    ``angles`` has one entry per register value; ``reg_qubits[b]`` holds bit b
    of the value.
    """
    i0 = _pair_bases(amps.shape[0], target)
    vals = np.zeros(i0.shape[0], dtype=np.int64)
    for b, q in enumerate(reg_qubits):
        vals |= ((i0 >> q) & 1) << b
    half = 0.5 * angles[vals]
    c = np.cos(half)
    s = np.sin(half)
    i1 = i0 + (1 << target)
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = c * a0 - s * a1
    amps[i1] = s * a0 + c * a1


def apply_permutation(amps, perm):
    """Move the amplitude at index i to index perm[i]."""
    out = np.empty_like(amps)
    out[perm] = amps
    amps[:] = out


def flip_signs(amps, mask):
    """Negate amplitudes where ``mask`` (uint8) is nonzero."""
    sel = mask.view(bool)
    amps[sel] = -amps[sel]


def masked_probability(amps, mask):
    """Total probability of the basis indices selected by ``mask``."""
    sel = mask.view(bool)
    a = amps[sel]
    return float(np.sum(a.real * a.real + a.imag * a.imag))


def uniform_diffusion(amps):
    """Apply v -> v - 2*mean(v), the reflection -(2|s><s| - I)."""
    amps -= 2.0 * amps.mean()


def norm_sq(amps):
    return float(np.vdot(amps, amps).real)
