"""Hot-loop kernels with a compiled core and a NumPy fallback.

The Cython extension is preferred when it was built; otherwise the
NumPy implementation is selected at import time.  Set the environment
variable ``OUDISCOUNT_KERNELS`` to ``numpy`` or ``cython`` to force a
backend (forcing ``cython`` raises if the extension is missing).

Both backends expose the same two functions with identical semantics:

``ar1_path(x0, target, coef, shock_scale, shocks)``
    Exact-transition AR(1) recursion over a pre-drawn shock vector.

``path_integrals(r0, target, coef, shock_scale, dt, n_steps, n_paths, rng)``
    Trapezoidal time-integrals of many AR(1) paths driven by ``rng``.
"""

import os

from . import _ou_numpy

_forced = os.environ.get("OUDISCOUNT_KERNELS", "").strip().lower()

if _forced == "numpy":
    _impl = _ou_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _ou_ext as _impl
        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _ou_numpy
        BACKEND = "numpy"

ar1_path = _impl.ar1_path
path_integrals = _impl.path_integrals


def available_backends() -> dict:
    """Importable backends by name (used by the benchmark and tests)."""
    found = {"numpy": _ou_numpy}
    try:
        from . import _ou_ext
        found["cython"] = _ou_ext
    except ImportError:
        pass
    return found
