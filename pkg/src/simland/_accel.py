"""Selects between numba-compiled kernels and the pure-numpy fallback.

Set ``SIMLAND_NUMBA=0`` before import to force the numpy path.
"""
import os

_flag = os.environ.get("SIMLAND_NUMBA", "1").strip().lower()
_requested = _flag not in ("0", "false", "no", "off")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dep, kept optional for the fallback
    numba = None

USE_NUMBA = _requested and numba is not None


def njit(func):
    """``numba.njit(cache=True)`` when numba is available, identity otherwise."""
    if numba is None:
        return func
    return numba.njit(cache=True)(func)
