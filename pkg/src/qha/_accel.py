"""Numba acceleration shim.

Hot kernels live in ``qha._kernels`` in two variants: an explicit-loop
version compiled with ``numba.njit`` and a vectorized pure-numpy fallback.
The numba path is used when numba imports cleanly and the environment
variable ``QHA_NO_NUMBA`` is unset/empty.  Both paths compute identical
results (up to float rounding of reorderings) and are cross-checked in the
test suite; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

__all__ = ["njit", "HAVE_NUMBA", "USE_NUMBA"]

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


USE_NUMBA = HAVE_NUMBA and not os.environ.get("QHA_NO_NUMBA")
