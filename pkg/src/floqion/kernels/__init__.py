"""Hot kernels for the time propagation: block-banded matvec and the banded
Cholesky overlap solve.

Two interchangeable backends: numba @njit loops (default) and a
numpy/scipy path.  Set FLOQION_NUMBA=0 to force the numpy backend; the
numpy path is also the automatic fallback when numba is unavailable.
benchmarks/bench_kernels.py compares the two.
"""

import os

BACKEND = "numpy"
if os.environ.get("FLOQION_NUMBA", "1") != "0":
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        from . import numpy_backend as _impl
else:
    from . import numpy_backend as _impl

HamiltonianApplier = _impl.HamiltonianApplier
OverlapSolver = _impl.OverlapSolver

__all__ = ["BACKEND", "HamiltonianApplier", "OverlapSolver"]
