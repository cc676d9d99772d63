"""Numpy fallback for the compiled kernel core.

Matches the compiled module function-for-function. Results agree with the
compiled kernels to rounding (BLAS accumulates in a different order), and
repeated calls on identical inputs are bit-identical within one backend.
"""

import math

import numpy as np

NAME = "numpy"


def matvec(a, x):
    return a @ x


def gemm(a, b):
    return a @ b


def cholesky(a, pivot_tol):
    """Lower Cholesky factor of ``a``.

    Returns (L, -1) on success or (partial L, j) when pivot j is <= pivot_tol.
    """
    n = a.shape[0]
    lower = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= pivot_tol:
            return lower, j
        ljj = math.sqrt(d)
        lower[j, j] = ljj
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / ljj
    return lower, -1


def solve_lower(lower, b):
    n = lower.shape[0]
    y = np.empty_like(b)
    for i in range(n):
        y[i] = (b[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    return y


def solve_lower_trans(lower, b):
    n = lower.shape[0]
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return x


def rbf_gram(x, signal_var, inv_two_ell2, jitter):
    """Dense RBF Gram matrix with exact symmetry and exact diagonal."""
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    k = signal_var * np.exp(-d2 * inv_two_ell2)
    k = np.tril(k, -1)
    k = k + k.T
    np.fill_diagonal(k, signal_var + jitter)
    return k


def rbf_cross(xa, xb, signal_var, inv_two_ell2):
    sqa = np.einsum("ij,ij->i", xa, xa)
    sqb = np.einsum("ij,ij->i", xb, xb)
    d2 = sqa[:, None] + sqb[None, :] - 2.0 * (xa @ xb.T)
    np.maximum(d2, 0.0, out=d2)
    return signal_var * np.exp(-d2 * inv_two_ell2)


def jacobi_sweep(a, v):
    """One cyclic sweep of Jacobi rotations on symmetric ``a``, in place.

    ``v`` accumulates the rotations. Returns the number of rotations applied.
    """
    n = a.shape[0]
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            g = 100.0 * abs(apq)
            if abs(a[p, p]) + g == abs(a[p, p]) and abs(a[q, q]) + g == abs(a[q, q]):
                a[p, q] = 0.0
                a[q, p] = 0.0
                continue
            if apq == 0.0:
                continue
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            if tau >= 0.0:
                t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
            else:
                t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c

            col_p = a[:, p].copy()
            col_q = a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p = a[p, :].copy()
            row_q = a[q, :].copy()
            a[p, :] = c * row_p - s * row_q
            a[q, :] = s * row_p + c * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
            rotations += 1
    return rotations
