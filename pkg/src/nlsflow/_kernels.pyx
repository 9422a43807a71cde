# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled direct-sum kernels.

Both routines are O(N**3) enumerations over frequency triples and serve as
independent references for the FFT code paths.
"""

import numpy as np

from libc.math cimport cos, sin, pow, M_PI


def direct_cubic(const double complex[::1] c, int N):
    """Band-limited cubic coefficients ``(2 pi)^-1 sum c[k1] conj(c[k2]) c[k3]``.

    The sum runs over ``k1 - k2 + k3 = k`` with every index in ``[-N, N]``.
    """
    cdef Py_ssize_t n = 2 * N + 1
    if c.shape[0] != n:
        raise ValueError("coefficient length does not match N")
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef int k, k1, k2, lo, hi
    cdef double complex acc, a
    cdef double scale = 1.0 / (2.0 * M_PI)
    for k in range(-N, N + 1):
        acc = 0
        for k1 in range(-N, N + 1):
            # k3 = k - k1 + k2 must stay in [-N, N]
            lo = max(-N, k1 - k - N)
            hi = min(N, k1 - k + N)
            a = c[k1 + N]
            for k2 in range(lo, hi + 1):
                acc = acc + a * c[k2 + N].conjugate() * c[k - k1 + k2 + N]
        o[k + N] = acc * scale
    return out


def nonresonant_sum(const double complex[::1] v, int N, double alpha, double beta,
                    double r):
    """Nonresonant quadrilinear sum at time ``-r`` in interaction variables.

    Returns the complex value of
    ``(2 pi)^-1 sum exp(-i r Phi) v[k1] conj(v[k2]) v[k3] <k>^{2 alpha} conj(v[k])``
    over ``k = k1 - k2 + k3`` with ``(k1 - k2)(k3 - k2) != 0``.
    """
    cdef Py_ssize_t n = 2 * N + 1
    if v.shape[0] != n:
        raise ValueError("coefficient length does not match N")
    cdef double[::1] w = np.empty(n)
    cdef int k, k1, k2, k3
    for k in range(-N, N + 1):
        w[k + N] = pow(1.0 + <double>k * k, alpha)
    cdef double complex acc = 0, term, a
    cdef double phi, shift = 2.0 * beta / 3.0
    cdef int lo, hi
    for k1 in range(-N, N + 1):
        for k2 in range(-N, N + 1):
            if k1 == k2:
                continue
            a = v[k1 + N] * v[k2 + N].conjugate()
            # k = k1 - k2 + k3 must stay in [-N, N]
            lo = max(-N, k2 - k1 - N)
            hi = min(N, k2 - k1 + N)
            for k3 in range(lo, hi + 1):
                if k3 == k2:
                    continue
                k = k1 - k2 + k3
                phi = 3.0 * (k1 - k2) * (k3 - k2) * (k1 + k3 - shift)
                term = a * v[k3 + N] * v[k + N].conjugate() * w[k + N]
                acc = acc + term * (cos(r * phi) - 1j * sin(r * phi))
    return complex(acc / (2.0 * M_PI))
