"""Backend selection for the hot kernels.

The numba path is used when numba imports cleanly and ``QPOLY_NUMBA`` is not
set to a false value (``0``, ``false``, ``off``, ``no``). The pure-numpy path
implements the same algorithm and is what runs otherwise.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FALSE = {"0", "false", "off", "no"}

NUMBA_AVAILABLE = numba is not None
_use_numba = NUMBA_AVAILABLE and os.environ.get("QPOLY_NUMBA", "1").strip().lower() not in _FALSE


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if _use_numba else "numpy"


def set_backend(name):
    """Switch the kernel backend at runtime; returns the previous name."""
    global _use_numba
    previous = backend()
    if name == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("numba is not installed")
        _use_numba = True
    elif name == "numpy":
        _use_numba = False
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous
