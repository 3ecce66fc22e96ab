"""Numba availability and the env switch that selects the kernel path.

Set ``DECAYKIT_NUMBA=0`` (or ``off``/``false``/``no``) before import to force
the pure-numpy kernels. The flag is read once, at import time.
"""
import os

_OFF = {"0", "off", "false", "no"}

try:
    from numba import njit as _numba_njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    _numba_njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DECAYKIT_NUMBA", "1").strip().lower() not in _OFF


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator.

    The decorated function is always compiled when numba exists, so the
    benchmark can compare both paths in one process; dispatch is decided in
    :mod:`decaykit.kernels`.
    """
    if HAVE_NUMBA:
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
