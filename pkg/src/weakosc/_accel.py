"""Backend selection for the numeric kernels.

Kernels are compiled with ``numba.njit`` unless the environment variable
``WEAKOSC_DISABLE_NUMBA`` is set to a truthy value (or numba is missing), in
which case the same functions run as plain Python over numpy arrays.  The flag
is read once at import time.
"""

import os

DISABLE_ENV = "WEAKOSC_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _numba_requested() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in {"1", "true", "yes", "on"}


USE_NUMBA = numba is not None and _numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"


def kernel(fn):
    """Compile ``fn`` in nopython mode when the numba backend is active."""
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
