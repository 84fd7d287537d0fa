# cython: language_level=3
"""Compiled hot loops: Jacobi SVD sweeps and SDP Schur-complement assembly.

Both functions mirror :mod:`sparseinterp._fallback` exactly; the fallback is
the reference and the test-suite checks the two agree.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def jacobi_sweeps(double complex[:, ::1] W, double complex[:, ::1] Vt,
                  double tol, int max_sweeps):
    """One-sided Jacobi orthogonalisation of the rows of ``W`` in place.

    Rows of ``W`` are the columns of the input matrix. Each rotation is
    mirrored on the rows of ``Vt``. Returns the number of sweeps used, or -1
    when ``max_sweeps`` is exhausted.
    """
    cdef Py_ssize_t n = W.shape[0]
    cdef Py_ssize_t m = W.shape[1]
    cdef Py_ssize_t nv = Vt.shape[1]
    cdef Py_ssize_t p, q, k
    cdef double alpha, beta, g, zeta, t, c, s, negligible = 0.0
    cdef double complex gamma, e, wp, wq
    cdef int sweep, rotated, used = -1
    with nogil:
        # columns below this norm are numerically zero and are left alone
        for p in range(n):
            for k in range(m):
                negligible = negligible + cabs2(W[p, k])
        negligible = negligible * tol * tol
        for sweep in range(max_sweeps):
            rotated = 0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    alpha = 0.0
                    beta = 0.0
                    gamma = 0.0
                    for k in range(m):
                        alpha = alpha + cabs2(W[p, k])
                        beta = beta + cabs2(W[q, k])
                        gamma = gamma + W[p, k].conjugate() * W[q, k]
                    if alpha <= negligible or beta <= negligible:
                        continue
                    g = sqrt(cabs2(gamma))
                    if g == 0.0 or g <= tol * sqrt(alpha) * sqrt(beta):
                        continue
                    rotated = 1
                    e = gamma / g
                    zeta = (beta - alpha) / (2.0 * g)
                    if zeta >= 0:
                        t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                    else:
                        t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = c * t
                    for k in range(m):
                        wp = W[p, k]
                        wq = W[q, k] * e.conjugate()
                        W[p, k] = c * wp - s * wq
                        W[q, k] = s * wp + c * wq
                    for k in range(nv):
                        wp = Vt[p, k]
                        wq = Vt[q, k] * e.conjugate()
                        Vt[p, k] = c * wp - s * wq
                        Vt[q, k] = s * wp + c * wq
            if not rotated:
                used = sweep + 1
                break
    return used


def schur_accumulate(double[:, ::1] M, int[::1] rows, int[::1] cols,
                     int[::1] params, double[::1] coefs,
                     double[:, ::1] X, double[:, ::1] W):
    """Add ``tr(F_i X F_j W)`` for one block to ``M[i, j]``.

    The block's coefficient matrices are given in coordinate form: entry
    ``k`` contributes ``coefs[k]`` at ``(rows[k], cols[k])`` of ``F_{params[k]}``.
    """
    cdef Py_ssize_t nnz = rows.shape[0]
    cdef Py_ssize_t a, b
    cdef int p, q, i
    cdef double v
    with nogil:
        for a in range(nnz):
            p = rows[a]
            q = cols[a]
            i = params[a]
            v = coefs[a]
            for b in range(nnz):
                M[i, params[b]] += v * coefs[b] * X[q, rows[b]] * W[cols[b], p]
