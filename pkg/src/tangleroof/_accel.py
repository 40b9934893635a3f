"""Optional numba acceleration.

Set ``TANGLEROOF_DISABLE_NUMBA=1`` to force the pure-numpy code paths,
e.g. for debugging or to compare both routes in the benchmark.
"""
import os
import warnings

_FLAG = "TANGLEROOF_DISABLE_NUMBA"


class PerformanceWarning(UserWarning):
    pass


def _requested_off():
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _requested_off():
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False
    _njit = None

    if not _requested_off():
        warnings.warn(
            "numba is not available; falling back to numpy kernels",
            PerformanceWarning,
        )


def njit(func=None, **kwargs):
    """``numba.njit`` with caching, or the identity when numba is off."""
    kwargs.setdefault("cache", True)

    def wrap(f):
        if not HAS_NUMBA:
            return f
        return _njit(**kwargs)(f)

    if func is None:
        return wrap
    return wrap(func)


__all__ = ["HAS_NUMBA", "PerformanceWarning", "njit"]
