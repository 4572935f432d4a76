"""Optional numba acceleration.

Set ``PLANAR_BILINEAR_JIT=0`` to force the pure-numpy kernels, e.g. when
debugging or when numba is unavailable for the running interpreter.
"""

import os
import warnings

_flag = os.environ.get("PLANAR_BILINEAR_JIT", "1").strip().lower()
JIT_REQUESTED = _flag not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    numba = None
    HAVE_NUMBA = False
    if JIT_REQUESTED:
        warnings.warn("numba not found; using the numpy kernels", RuntimeWarning)

USE_JIT = JIT_REQUESTED and HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def identity(func):
        return func

    return identity
