# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled split-step kernels; see _kernels_py for the reference versions.

Loops run on the interleaved (re, im) doubles directly: C99 complex
arithmetic carries inf/nan recovery branches that block vectorization.
"""

from libc.math cimport cos, sin


def kerr_phase_step(double complex[::1] a, double gamma_h):
    cdef Py_ssize_t k, n = a.shape[0]
    cdef double re, im, phi, c, s
    cdef double *p
    if n == 0:
        return
    p = <double *> &a[0]
    with nogil:
        for k in range(n):
            re = p[2 * k]
            im = p[2 * k + 1]
            phi = gamma_h * (re * re + im * im)
            c = cos(phi)
            s = sin(phi)
            p[2 * k] = re * c - im * s
            p[2 * k + 1] = re * s + im * c


def multiply_inplace(double complex[::1] a, const double complex[::1] h):
    cdef Py_ssize_t k, n = a.shape[0]
    cdef double ar, ai, hr, hi
    cdef double *p
    cdef const double *q
    if h.shape[0] != n:
        raise ValueError("length mismatch")
    if n == 0:
        return
    p = <double *> &a[0]
    q = <const double *> &h[0]
    with nogil:
        for k in range(n):
            ar = p[2 * k]
            ai = p[2 * k + 1]
            hr = q[2 * k]
            hi = q[2 * k + 1]
            p[2 * k] = ar * hr - ai * hi
            p[2 * k + 1] = ar * hi + ai * hr


def energy_sum(const double complex[::1] a):
    cdef Py_ssize_t k, n = 2 * a.shape[0]
    cdef double acc = 0.0
    cdef const double *p
    if n == 0:
        return 0.0
    p = <const double *> &a[0]
    with nogil:
        for k in range(n):
            acc += p[k] * p[k]
    return acc
