"""NumPy fallback for the hot loops.

The recursions are identical, value for value, to the compiled backend:
both consume standard normals in step-major order from the same
generator and apply the same floating-point expressions, so results
agree to rounding (bit-for-bit in practice, but only closeness is
promised).
"""

import numpy as np
from scipy.signal import lfilter


def ar1_path(x0: float, target: float, coef: float, shock_scale: float,
             shocks: np.ndarray) -> np.ndarray:
    """Exact-transition AR(1) path.

    ``out[0] = x0`` and ``out[i+1] = target + (out[i]-target)*coef
    + shock_scale*shocks[i]``, computed in deviation form; lfilter runs
    the recursion in C.
    """
    shocks = np.ascontiguousarray(shocks, dtype=np.float64)
    n = shocks.shape[0]
    out = np.empty(n + 1)
    out[0] = x0
    if n:
        dev0 = x0 - target
        scaled = shock_scale * shocks
        dev, _ = lfilter([1.0], [1.0, -coef], scaled, zi=np.array([coef * dev0]))
        out[1:] = target + dev
    return out


def path_integrals(r0: float, target: float, coef: float, shock_scale: float,
                   dt: float, n_steps: int, n_paths: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Trapezoidal time-integrals of ``n_paths`` AR(1) paths from ``r0``.

    Returns the accumulated integral per path; nothing else of the paths
    is retained, so memory stays O(n_paths) for any horizon.
    """
    r = np.full(n_paths, float(r0))
    x = np.zeros(n_paths)
    z = np.empty(n_paths)
    half_dt = 0.5 * dt
    for _ in range(n_steps):
        rng.standard_normal(out=z)
        r_new = target + (r - target) * coef + shock_scale * z
        x += half_dt * (r + r_new)
        r = r_new
    return x
