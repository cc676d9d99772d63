# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel core.

Hot loops only: dense products, Cholesky, triangular solves, RBF Gram
assembly and one Jacobi sweep. Accumulations run strictly left-to-right
(no -ffast-math), so results are reproducible bit-for-bit across runs.
"""

import numpy as np

from libc.math cimport exp, fabs, sqrt

NAME = "compiled"


def matvec(double[:, ::1] a, double[::1] x):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc = acc + a[i, j] * x[j]
        y[i] = acc
    return out


def gemm(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t kk = a.shape[1]
    cdef Py_ssize_t n = b.shape[1]
    out = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] c = out
    cdef Py_ssize_t i, k, j
    cdef double aik
    for i in range(m):
        for k in range(kk):
            aik = a[i, k]
            for j in range(n):
                c[i, j] = c[i, j] + aik * b[k, j]
    return out


def cholesky(double[:, ::1] a, double pivot_tol):
    cdef Py_ssize_t n = a.shape[0]
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] l = out
    cdef Py_ssize_t i, j, t
    cdef double acc, ljj
    for j in range(n):
        acc = a[j, j]
        for t in range(j):
            acc = acc - l[j, t] * l[j, t]
        if acc <= pivot_tol:
            return out, j
        ljj = sqrt(acc)
        l[j, j] = ljj
        for i in range(j + 1, n):
            acc = a[i, j]
            for t in range(j):
                acc = acc - l[i, t] * l[j, t]
            l[i, j] = acc / ljj
    return out, -1


def solve_lower(double[:, ::1] lower, double[::1] b):
    cdef Py_ssize_t n = lower.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = b[i]
        for j in range(i):
            acc = acc - lower[i, j] * y[j]
        y[i] = acc / lower[i, i]
    return out


def solve_lower_trans(double[:, ::1] lower, double[::1] b):
    cdef Py_ssize_t n = lower.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] x = out
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, n):
            acc = acc - lower[j, i] * x[j]
        x[i] = acc / lower[i, i]
    return out


def rbf_gram(double[:, ::1] x, double signal_var, double inv_two_ell2, double jitter):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] k = out
    cdef Py_ssize_t i, j, t
    cdef double acc, diff, val
    for i in range(n):
        k[i, i] = signal_var + jitter
        for j in range(i):
            acc = 0.0
            for t in range(d):
                diff = x[i, t] - x[j, t]
                acc = acc + diff * diff
            val = signal_var * exp(-acc * inv_two_ell2)
            k[i, j] = val
            k[j, i] = val
    return out


def rbf_cross(double[:, ::1] xa, double[:, ::1] xb, double signal_var, double inv_two_ell2):
    cdef Py_ssize_t na = xa.shape[0]
    cdef Py_ssize_t nb = xb.shape[0]
    cdef Py_ssize_t d = xa.shape[1]
    out = np.empty((na, nb), dtype=np.float64)
    cdef double[:, ::1] k = out
    cdef Py_ssize_t i, j, t
    cdef double acc, diff
    for i in range(na):
        for j in range(nb):
            acc = 0.0
            for t in range(d):
                diff = xa[i, t] - xb[j, t]
                acc = acc + diff * diff
            k[i, j] = signal_var * exp(-acc * inv_two_ell2)
    return out


def jacobi_sweep(double[:, ::1] a, double[:, ::1] v):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, i
    cdef double apq, g, tau, t, c, s, aip, aiq
    cdef long rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            g = 100.0 * fabs(apq)
            if fabs(a[p, p]) + g == fabs(a[p, p]) and fabs(a[q, q]) + g == fabs(a[q, q]):
                a[p, q] = 0.0
                a[q, p] = 0.0
                continue
            if apq == 0.0:
                continue
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            if tau >= 0.0:
                t = 1.0 / (tau + sqrt(1.0 + tau * tau))
            else:
                t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
            c = 1.0 / sqrt(1.0 + t * t)
            s = t * c

            for i in range(n):
                aip = a[i, p]
                aiq = a[i, q]
                a[i, p] = c * aip - s * aiq
                a[i, q] = s * aip + c * aiq
            for i in range(n):
                aip = a[p, i]
                aiq = a[q, i]
                a[p, i] = c * aip - s * aiq
                a[q, i] = s * aip + c * aiq
            a[p, q] = 0.0
            a[q, p] = 0.0

            for i in range(n):
                aip = v[i, p]
                aiq = v[i, q]
                v[i, p] = c * aip - s * aiq
                v[i, q] = s * aip + c * aiq
            rotations += 1
    return rotations
