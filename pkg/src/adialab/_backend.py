"""Kernel backend selection.

``ADIALAB_BACKEND=numpy`` forces the pure-numpy path; ``numba`` (the default)
uses compiled loops when numba is importable and silently falls back
otherwise.  The choice is made once, at import time.
"""

import logging
import os

logger = logging.getLogger(__name__)

_requested = os.environ.get("ADIALAB_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"ADIALAB_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _requested == "numba"
BACKEND = "numba" if USE_NUMBA else "numpy"

if _requested == "numba" and not HAVE_NUMBA:  # pragma: no cover
    logger.info("numba not importable; using the numpy backend")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity decorator otherwise.

    Compiled functions are always built when numba exists, so benchmarks can
    compare both paths in one process regardless of the env flag.
    """
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
