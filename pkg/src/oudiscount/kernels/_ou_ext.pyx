# Compiled kernels for the hot loops: sequential AR(1) recursion and the
# Monte Carlo path-integral accumulation.  Expressions and normal-draw
# order mirror _ou_numpy exactly so the two backends agree to rounding
# (the build disables FP contraction for that reason).

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal


def ar1_path(double x0, double target, double coef, double shock_scale,
             shocks):
    """Exact-transition AR(1) path; see the NumPy twin for the contract."""
    cdef double[::1] z = np.ascontiguousarray(shocks, dtype=np.float64)
    cdef Py_ssize_t n = z.shape[0]
    out_arr = np.empty(n + 1)
    cdef double[::1] out = out_arr
    cdef double dev = x0 - target
    cdef Py_ssize_t i
    out[0] = x0
    with nogil:
        for i in range(n):
            dev = shock_scale * z[i] + coef * dev
            out[i + 1] = target + dev
    return out_arr


def path_integrals(double r0, double target, double coef, double shock_scale,
                   double dt, Py_ssize_t n_steps, Py_ssize_t n_paths, rng):
    """Trapezoidal time-integrals of AR(1) paths, one value per path.

    Normals are drawn straight from ``rng``'s bit generator in step-major
    order (the same order the NumPy backend consumes them); the generator
    must not be used concurrently while this call runs.
    """
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(
        rng.bit_generator.capsule, "BitGenerator")
    x_arr = np.zeros(n_paths)
    r_arr = np.full(n_paths, r0)
    cdef double[::1] x = x_arr
    cdef double[::1] r = r_arr
    cdef double half_dt = 0.5 * dt
    cdef double rn
    cdef Py_ssize_t s, p
    with rng.bit_generator.lock, nogil:
        for s in range(n_steps):
            for p in range(n_paths):
                rn = target + (r[p] - target) * coef \
                    + shock_scale * random_standard_normal(bg)
                x[p] = x[p] + half_dt * (r[p] + rn)
                r[p] = rn
    return x_arr
