# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: phase-only projection and the INS alternating projection."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline double complex _unit(double complex z, double scale) noexcept nogil:
    # magnitudes here are O(1), so the plain sqrt cannot overflow
    cdef double m = sqrt(z.real * z.real + z.imag * z.imag)
    if m > 0.0:
        return (scale / m) * z
    return scale


def phase_project(x, double scale):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] flat = np.ascontiguousarray(x, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(flat)
    cdef double complex[::1] fv = flat
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i, n = fv.shape[0]
    with nogil:
        for i in range(n):
            ov[i] = _unit(fv[i], scale)
    return out.reshape(np.shape(x))


cdef double _leak(double complex[:, ::1] Hh, double complex[::1] a) noexcept nogil:
    # ||H_hat^H a||^2 with Hh = H_hat^H stored row-major (K, N)
    cdef Py_ssize_t k, i, K = Hh.shape[0], N = Hh.shape[1]
    cdef double complex s
    cdef double tot = 0.0
    for k in range(K):
        s = 0.0
        for i in range(N):
            s = s + Hh[k, i] * a[i]
        tot += s.real * s.real + s.imag * s.imag
    return tot


def ins_solve(H_hat, Q, A0, double tol, int max_iter):
    cdef double complex[:, ::1] Hh = np.ascontiguousarray(np.conj(np.asarray(H_hat, dtype=np.complex128)).T)
    cdef double complex[:, ::1] Qt = np.ascontiguousarray(np.asarray(Q, dtype=np.complex128).T)
    cdef double complex[:, ::1] Qh = np.ascontiguousarray(np.conj(np.asarray(Q, dtype=np.complex128)).T)
    A0 = np.asarray(A0, dtype=np.complex128)
    cdef Py_ssize_t N = A0.shape[0], C = A0.shape[1], K = Qt.shape[0]
    cdef double complex[:, ::1] At = np.ascontiguousarray(A0.T)
    out = np.empty((C, N), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    iters = np.zeros(C, dtype=np.int64)
    leak = np.zeros(C, dtype=np.float64)
    cdef long long[::1] itv = iters
    cdef double[::1] lkv = leak
    cdef double complex[::1] a = np.empty(N, dtype=np.complex128)
    cdef double complex[::1] best = np.empty(N, dtype=np.complex128)
    cdef double complex[::1] coef = np.empty(max(K, 1), dtype=np.complex128)
    cdef double scale = 1.0 / sqrt(<double>N)
    cdef Py_ssize_t c, i, k
    cdef int it
    cdef double lk, best_lk
    cdef double complex s, x
    with nogil:
        for c in range(C):
            for i in range(N):
                a[i] = At[c, i]
                best[i] = a[i]
            lk = _leak(Hh, a)
            best_lk = lk
            it = 0
            while lk > tol and it < max_iter:
                for k in range(K):
                    s = 0.0
                    for i in range(N):
                        s = s + Qh[k, i] * a[i]
                    coef[k] = s
                for i in range(N):
                    x = a[i]
                    for k in range(K):
                        x = x - Qt[k, i] * coef[k]
                    a[i] = _unit(x, scale)
                it += 1
                lk = _leak(Hh, a)
                if lk < best_lk:
                    best_lk = lk
                    for i in range(N):
                        best[i] = a[i]
            for i in range(N):
                ov[c, i] = best[i]
            itv[c] = it
            lkv[c] = best_lk
    return np.ascontiguousarray(out.T), iters, leak
