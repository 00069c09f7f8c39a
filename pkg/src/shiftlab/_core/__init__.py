"""Kernel backend selection.

The hot kernels (factorization passes and fused steps) exist twice: a
Cython extension (``_kernels``) and a pure-Python fallback
(``_kernels_py``).  The compiled backend is preferred when importable;
set ``SHIFTLAB_PURE_PYTHON=1`` to force the fallback.  Both backends
implement the same operation sequence and produce bitwise-identical
results; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

from shiftlab._core import _kernels_py

if os.environ.get("SHIFTLAB_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from shiftlab._core import _kernels as _impl  # compiled extension
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

qr_star_pass = _impl.qr_star_pass
phi_star_apply = _impl.phi_star_apply
rq_star_pass = _impl.rq_star_pass
rq_conjugate = _impl.rq_conjugate
