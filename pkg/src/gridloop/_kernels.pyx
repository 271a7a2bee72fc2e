# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-step LTI integration kernel.

The hot loop of every time-domain run is the recurrence

    x[k+1] = MA @ x[k] + G0 @ u[k] + G1 @ u[k+1]

with dense precomputed matrices (see tfcore.simulate for how MA/G0/G1
encode an RK4 step with linearly interpolated inputs).  This module runs
that recurrence with BLAS dgemv calls and no Python-object traffic.

Build failures are tolerated: gridloop._backend falls back to the numpy
implementation in gridloop._kernels_py, which has identical semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite
from scipy.linalg.cython_blas cimport dasum, dgemv

cnp.import_array()


def run_lti(double[:, ::1] MA, double[:, ::1] G0, double[:, ::1] G1,
            double[:, ::1] U, double[::1] x0, double[:, ::1] C,
            double[:, ::1] D, int stride):
    """Step the recurrence, recording outputs every ``stride`` steps.

    Parameters mirror gridloop._kernels_py.run_lti (the reference
    implementation).  Returns ``(Y, x_final, bad_record)`` where
    ``bad_record`` is -1 on success or the index of the first recorded
    sample at which the state stopped being finite.
    """
    cdef Py_ssize_t n = MA.shape[0]
    cdef Py_ssize_t m = G0.shape[1]
    cdef Py_ssize_t p = C.shape[0]
    cdef Py_ssize_t K = U.shape[0] - 1
    cdef Py_ssize_t nrec = K // stride + 1

    Y_arr = np.empty((nrec, p), dtype=np.float64)
    x_arr = np.array(x0, dtype=np.float64, copy=True)
    xn_arr = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] Y = Y_arr
    cdef double[::1] x = x_arr
    cdef double[::1] xn = xn_arr

    cdef int in_ = <int> n, im = <int> m, ip = <int> p, one = 1
    cdef double a1 = 1.0, b0 = 0.0, b1 = 1.0, s
    cdef char tr = b'T'
    cdef Py_ssize_t k, j, rec
    cdef double *xp = &x[0]
    cdef double *xnp = &xn[0]
    cdef double *tmp

    # Record sample 0: y = C x + D u0.
    dgemv(&tr, &in_, &ip, &a1, &C[0, 0], &in_, xp, &one, &b0, &Y[0, 0], &one)
    if m > 0:
        dgemv(&tr, &im, &ip, &a1, &D[0, 0], &im, &U[0, 0], &one, &b1,
              &Y[0, 0], &one)

    j = 1
    for k in range(K):
        # xn = MA x + G0 u[k] + G1 u[k+1]
        dgemv(&tr, &in_, &in_, &a1, &MA[0, 0], &in_, xp, &one, &b0, xnp, &one)
        if m > 0:
            dgemv(&tr, &im, &in_, &a1, &G0[0, 0], &im, &U[k, 0], &one, &b1,
                  xnp, &one)
            dgemv(&tr, &im, &in_, &a1, &G1[0, 0], &im, &U[k + 1, 0], &one,
                  &b1, xnp, &one)
        tmp = xp
        xp = xnp
        xnp = tmp

        if (k + 1) % stride == 0:
            dgemv(&tr, &in_, &ip, &a1, &C[0, 0], &in_, xp, &one, &b0,
                  &Y[j, 0], &one)
            if m > 0:
                dgemv(&tr, &im, &ip, &a1, &D[0, 0], &im, &U[k + 1, 0], &one,
                      &b1, &Y[j, 0], &one)
            s = dasum(&in_, xp, &one)
            if not isfinite(s):
                if xp != &x[0]:
                    x_arr[:] = xn_arr
                return Y_arr, x_arr, j
            j += 1

    if xp != &x[0]:
        x_arr[:] = xn_arr
    return Y_arr, x_arr, -1
