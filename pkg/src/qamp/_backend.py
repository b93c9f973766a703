"""Kernel backend selection.

The compiled Cython extension is preferred when present; otherwise the numpy
fallback is used. Set the environment variable ``QAMP_PURE_PYTHON=1`` to
force the fallback (useful for benchmarking the two backends against each
other, see benchmarks/kernel_bench.py).
"""

from __future__ import annotations

import os

if os.environ.get("QAMP_PURE_PYTHON", "") not in ("", "0"):
    from qamp import _kernels_py as kernels
else:
    try:
        from qamp import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from qamp import _kernels_py as kernels  # type: ignore[no-redef]


def backend_name() -> str:
    return "compiled" if kernels.COMPILED else "numpy"
