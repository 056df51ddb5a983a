"""Kernel core selection: compiled Cython extension when available, numpy fallback otherwise.

Both backends implement identical contracts (exact results, identical
tie-breaking), verified against each other in the test suite.  Select
explicitly with ``use_backend`` for benchmarking.
"""

import numpy as np

from . import reference

try:
    from . import _core

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-env dependent
    _core = None
    HAVE_COMPILED = False

_active = "compiled" if HAVE_COMPILED else "fallback"


def backend_name() -> str:
    return _active


def use_backend(name: str) -> None:
    global _active
    if name not in ("compiled", "fallback"):
        raise ValueError("backend must be 'compiled' or 'fallback'")
    if name == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernels are not available in this install")
    _active = name


def _c(arr):
    return np.ascontiguousarray(arr, dtype=np.float64)


def infconv_bruteforce(u, wx, wt):
    if _active == "compiled":
        return _core.infconv_bruteforce(_c(u), _c(wx), _c(wt))
    return reference.infconv_bruteforce(u, wx, wt)


def psi_pair_scan(u, lphi, pen_x, pen_y, pen_t):
    if _active == "compiled":
        return _core.psi_pair_scan(_c(u), _c(lphi), _c(pen_x), _c(pen_y), _c(pen_t))
    return reference.psi_pair_scan(
        np.asarray(u, float),
        np.asarray(lphi, float),
        np.asarray(pen_x, float),
        np.asarray(pen_y, float),
        np.asarray(pen_t, float),
    )
