"""Optional numba acceleration.

Set ``RESPLAN_DISABLE_NUMBA=1`` to force the pure numpy/scipy kernels. When numba
is not importable the fallback is selected automatically.
"""
import os

_DISABLED = os.environ.get("RESPLAN_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or a passthrough when numba is unavailable."""
    if _njit is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return _njit(*args, **kwargs)
