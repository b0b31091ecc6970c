# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch kernel for the simultaneous (Aberth-Ehrlich) root iteration.

Mirrors _aberth_py: Jacobi update schedule, identical convergence test, so
the fallback and this kernel agree on the computed roots.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport hypot

cnp.import_array()


def aberth_sweeps(coeffs_in, z0, int max_sweeps, double tol):
    """Run Aberth-Ehrlich sweeps on a batch of polynomials.

    coeffs_in: (B, n+1) complex, ascending powers; z0: (B, n) starts.
    Returns (roots, converged, sweeps).
    """
    coeffs_arr = np.ascontiguousarray(coeffs_in, dtype=np.complex128)
    roots_arr = np.array(z0, dtype=np.complex128, copy=True, order="C")
    cdef Py_ssize_t B = coeffs_arr.shape[0]
    cdef Py_ssize_t n = coeffs_arr.shape[1] - 1
    conv_arr = np.zeros(B, dtype=np.uint8)
    sweeps_arr = np.zeros(B, dtype=np.int64)
    delta_arr = np.empty(n, dtype=np.complex128)

    cdef double complex[:, ::1] coeffs = coeffs_arr
    cdef double complex[:, ::1] z = roots_arr
    cdef unsigned char[::1] conv = conv_arr
    cdef long long[::1] sweeps = sweeps_arr
    cdef double complex[::1] delta = delta_arr

    cdef Py_ssize_t b, i, j, k, it
    cdef double complex p, dp, ssum, d, den, zi, dl
    cdef bint all_ok

    with nogil:
        for b in range(B):
            for it in range(max_sweeps):
                for i in range(n):
                    zi = z[b, i]
                    p = coeffs[b, n]
                    dp = 0
                    for k in range(n - 1, -1, -1):
                        dp = dp * zi + p
                        p = p * zi + coeffs[b, k]
                    ssum = 0
                    for j in range(n):
                        if j != i:
                            d = zi - z[b, j]
                            if d != 0:
                                ssum = ssum + 1.0 / d
                    den = dp - p * ssum
                    if den == 0:
                        den = 1
                    delta[i] = p / den
                all_ok = True
                for i in range(n):
                    dl = delta[i]
                    z[b, i] = z[b, i] - dl
                    if hypot(dl.real, dl.imag) > tol * (1.0 + hypot(z[b, i].real, z[b, i].imag)):
                        all_ok = False
                sweeps[b] = it + 1
                if all_ok:
                    conv[b] = 1
                    break
    return roots_arr, conv_arr.astype(bool), sweeps_arr
