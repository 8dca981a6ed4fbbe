"""Numba dispatch for hot kernels.

Every kernel is written once as plain loop code over numpy arrays.  The
``kernel`` decorator keeps both the interpreted function and its numba
compilation; which one is exported is decided at import time by the
``RETNET_DISABLE_JIT`` environment variable (any value other than ``""`` or
``"0"`` selects the interpreted path).  Both paths perform the same
floating-point operations in the same order, so they return identical results.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_DISABLED = os.environ.get("RETNET_DISABLE_JIT", "0") not in ("", "0") or numba is None

_PY = {}
_JIT = {}


def kernel(func):
    name = func.__name__
    _PY[name] = func
    if numba is not None:
        _JIT[name] = numba.njit(cache=True, nogil=True)(func)
    if JIT_DISABLED:
        return func
    return _JIT[name]


def implementation(name, jit):
    """Return the interpreted (``jit=False``) or compiled version of a kernel."""
    if jit:
        if name not in _JIT:
            raise RuntimeError("numba is not available")
        return _JIT[name]
    return _PY[name]


def backend():
    return "python" if JIT_DISABLED else "numba"
