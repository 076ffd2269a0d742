"""Optional JIT acceleration for the numeric kernels.

The kernels are written as plain Python operating on float64 scalars and
numpy arrays, so they run unchanged without numba; numba only removes the
interpreter overhead. Default njit settings keep IEEE semantics (no
fastmath), so results are bit-identical either way.
"""

try:
    from numba import njit as _njit

    def jit_kernel(fn):
        return _njit(cache=True)(fn)

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    def jit_kernel(fn):
        return fn

    HAVE_NUMBA = False
