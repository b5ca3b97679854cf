"""Numba switch for the double-precision kernels.

Set ``JKDPOLES_DISABLE_NUMBA=1`` to force the pure-numpy code path. When numba
is not importable the numpy path is used silently.
"""

import os

_DISABLED = os.environ.get("JKDPOLES_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not _DISABLED

NUMBA_OPTS = {"cache": True, "fastmath": False}


def njit(func):
    """Compile ``func`` in nopython mode, or return it unchanged when disabled."""
    if not USE_NUMBA:
        return func
    return numba.njit(func, **NUMBA_OPTS)
