# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled exponential-multiply kernels for d = 1 and d = 2 batches.

Same closed forms as the numpy fallback, evaluated entry by entry to avoid
temporaries and per-call dispatch overhead in the integrator hot loop.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

DEF SINC_CUTOFF = 1e-30


def expmul_d1(cnp.complex128_t[:, :, ::1] a,
              cnp.complex128_t[:, :, ::1] u,
              double t):
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] out = np.empty((n, 1, 1), dtype=np.complex128)
    cdef cnp.complex128_t[:, :, ::1] o = out
    cdef Py_ssize_t i
    cdef double w
    for i in range(n):
        # a is skew-Hermitian, so a[i] is purely imaginary
        w = a[i, 0, 0].imag * t
        o[i, 0, 0] = (cos(w) + 1j * sin(w)) * u[i, 0, 0]
    return out


def expmul_d2(cnp.complex128_t[:, :, ::1] a,
              cnp.complex128_t[:, :, ::1] u,
              double t):
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] out = np.empty((n, 2, 2), dtype=np.complex128)
    cdef cnp.complex128_t[:, :, ::1] o = out
    cdef Py_ssize_t i
    cdef double p, q, phi, delta, r, c, s, zr, zi
    cdef double complex ph, e00, e01, e10, e11
    for i in range(n):
        p = a[i, 0, 0].imag
        q = a[i, 1, 1].imag
        zr = a[i, 0, 1].real
        zi = a[i, 0, 1].imag
        phi = 0.5 * (p + q)
        delta = 0.5 * (p - q)
        r = sqrt(delta * delta + zr * zr + zi * zi)
        c = cos(r * t)
        if r > SINC_CUTOFF:
            s = sin(r * t) / r
        else:
            s = t
        ph = cos(phi * t) + 1j * sin(phi * t)
        e00 = ph * (c + 1j * (s * delta))
        e01 = ph * (s * (zr + 1j * zi))
        e10 = ph * (s * (-zr + 1j * zi))
        e11 = ph * (c - 1j * (s * delta))
        o[i, 0, 0] = e00 * u[i, 0, 0] + e01 * u[i, 1, 0]
        o[i, 0, 1] = e00 * u[i, 0, 1] + e01 * u[i, 1, 1]
        o[i, 1, 0] = e10 * u[i, 0, 0] + e11 * u[i, 1, 0]
        o[i, 1, 1] = e10 * u[i, 0, 1] + e11 * u[i, 1, 1]
    return out
