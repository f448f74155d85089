"""Kernel backend selection.

``MIXTYPE_BACKEND=numpy`` forces the pure-numpy path; ``numba`` (the default
when numba imports) uses the compiled kernels. ``MIXTYPE_THREADS`` caps the
numba worker count, 0 meaning automatic.
"""

import os

import numpy as np

from . import _kernels_numpy

_requested = os.environ.get("MIXTYPE_BACKEND", "numba").strip().lower()

_numba = None
if _requested != "numpy":
    try:
        from . import _kernels_numba as _numba
    except ImportError:  # pragma: no cover - numba is optional at runtime
        _numba = None

BACKEND = "numba" if _numba is not None else "numpy"


def _impl(name, backend=None):
    which = backend or BACKEND
    if which == "numba":
        if _numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return getattr(_numba, name)
    return getattr(_kernels_numpy, name)


def set_threads(n: int | None = None) -> None:
    """Apply ``MIXTYPE_THREADS`` (or an explicit count) to numba's pool."""
    if _numba is None:
        return
    import numba

    if n is None:
        n = int(os.environ.get("MIXTYPE_THREADS", "0") or 0)
    if n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _flat(*arrays):
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=np.float64) for a in arrays])
    shape = arrs[0].shape
    return shape, [np.ascontiguousarray(a).ravel() for a in arrs]


def image_sum(kind, x, x1, s, n_cap=32, tol=1e-12, backend=None):
    shape, (x, x1, s) = _flat(x, x1, s)
    return _impl("image_sum", backend)(kind, x, x1, s, int(n_cap), float(tol)).reshape(shape)


def erfc_layer(z, s, n_cap=32, tol=1e-12, backend=None):
    shape, (z, s) = _flat(z, s)
    return _impl("erfc_layer", backend)(z, s, int(n_cap), float(tol)).reshape(shape)


def volterra_march(c, E, H, omega_a, omega_b, sqrt_h, step_inv, backend=None):
    return _impl("volterra_march", backend)(
        np.ascontiguousarray(c, dtype=np.float64),
        np.ascontiguousarray(E, dtype=np.float64),
        np.ascontiguousarray(H, dtype=np.float64),
        np.ascontiguousarray(omega_a, dtype=np.float64),
        np.ascontiguousarray(omega_b, dtype=np.float64),
        float(sqrt_h),
        np.ascontiguousarray(step_inv, dtype=np.float64),
    )
