"""Kernel backend selection: numba JIT when available, pure numpy otherwise.

Set ``PREFSTUDY_NO_NUMBA=1`` to force the numpy fallback (useful for
debugging and for benchmarking the two paths against each other).
"""

import os


def _numba_available() -> bool:
    if os.environ.get("PREFSTUDY_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_available()
BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def maybe_njit(**jit_kwargs):
    """Decorator applying ``numba.njit`` when the numba backend is active."""

    def decorate(fn):
        if NUMBA_ENABLED:
            from numba import njit

            jit_kwargs.setdefault("cache", True)
            return njit(**jit_kwargs)(fn)
        return fn

    return decorate
