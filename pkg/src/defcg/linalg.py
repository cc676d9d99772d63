"""Dense symmetric linear algebra on top of the kernel backend.

Matrices are plain float64 numpy arrays, row-major. Cholesky factors are
lower-triangular arrays. The eigensolver is cyclic Jacobi, intended for the
small projected problems and diagnostics (n up to a few hundred).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite

SYMMETRY_RTOL = 1e-12


@dataclass
class EigenPairs:
    """Eigenvalues in ascending order and matching unit-norm column vectors."""

    values: np.ndarray
    vectors: np.ndarray


def as_matrix(a):
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={out.ndim}")
    return out


def as_vector(v):
    out = np.ascontiguousarray(v, dtype=np.float64)
    if out.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got ndim={out.ndim}")
    return out


def require_square(a):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got {a.shape}")
    return a


def require_symmetric(a, rtol=SYMMETRY_RTOL):
    a = require_square(a)
    if a.size:
        scale = np.max(np.abs(a))
        if np.max(np.abs(a - a.T)) > rtol * max(scale, 1e-300):
            raise ValueError("matrix is not symmetric within tolerance")
    return a


def matvec(a, v):
    a = as_matrix(a)
    v = as_vector(v)
    if a.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"matvec shapes {a.shape} and {v.shape}")
    return _kernels.matvec(a, v)


def gemm(x, y):
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape[1] != y.shape[0]:
        raise DimensionMismatch(f"gemm shapes {x.shape} and {y.shape}")
    return _kernels.gemm(x, y)


def default_pivot_tol(a):
    top = np.max(np.diag(a)) if a.shape[0] else 0.0
    return 1e-14 * max(top, 0.0)


def cholesky_factor(a, pivot_tol=None):
    """Lower-triangular L with L L' = a.

    Raises NotPositiveDefinite (with the pivot index) when a pivot falls at
    or below pivot_tol, which defaults to 1e-14 times the largest diagonal
    entry.
    """
    a = require_symmetric(a)
    if pivot_tol is None:
        pivot_tol = default_pivot_tol(a)
    lower, fail = _kernels.cholesky(a, float(pivot_tol))
    if fail >= 0:
        raise NotPositiveDefinite(fail)
    return lower


def cholesky_solve(lower, b):
    """Solve A x = b given the Cholesky factor of A."""
    lower = require_square(lower)
    b = as_vector(b)
    if lower.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"solve shapes {lower.shape} and {b.shape}")
    y = _kernels.solve_lower(lower, b)
    return _kernels.solve_lower_trans(lower, y)


def solve_lower(lower, b):
    lower = require_square(lower)
    b = as_vector(b)
    if lower.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"solve shapes {lower.shape} and {b.shape}")
    return _kernels.solve_lower(lower, b)


def solve_lower_matrix(lower, b):
    """Forward-substitute every column of ``b``. Small systems only."""
    lower = require_square(lower)
    b = as_matrix(b)
    if lower.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"solve shapes {lower.shape} and {b.shape}")
    out = np.empty_like(b)
    for j in range(b.shape[1]):
        out[:, j] = _kernels.solve_lower(lower, np.ascontiguousarray(b[:, j]))
    return out


def cholesky_solve_matrix(lower, b):
    """Solve A X = B column by column given the Cholesky factor of A."""
    b = as_matrix(b)
    out = np.empty_like(b)
    for j in range(b.shape[1]):
        out[:, j] = cholesky_solve(lower, np.ascontiguousarray(b[:, j]))
    return out


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def sym_eigen(a, max_sweeps=60, rtol=1e-14):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Returns ascending eigenvalues with orthonormal eigenvectors as columns.
    Raises NoConvergence if the off-diagonal mass has not dropped below
    rtol * ||a||_F within max_sweeps sweeps.
    """
    a = require_symmetric(a)
    n = a.shape[0]
    if n == 0:
        return EigenPairs(np.empty(0), np.empty((0, 0)))
    work = a.copy()
    vectors = np.eye(n)
    frob = float(np.sqrt(np.sum(a * a)))
    if frob == 0.0:
        return EigenPairs(np.zeros(n), vectors)
    converged = _offdiag_norm(work) <= rtol * frob
    for _ in range(max_sweeps):
        if converged:
            break
        _kernels.jacobi_sweep(work, vectors)
        converged = _offdiag_norm(work) <= rtol * frob
    if not converged:
        raise NoConvergence(max_sweeps)
    values = np.diag(work).copy()
    order = np.argsort(values, kind="stable")
    return EigenPairs(values[order], np.ascontiguousarray(vectors[:, order]))


def gen_sym_eigen(g, f, max_sweeps=60):
    """Solve G u = theta F u for symmetric G and SPD F.

    Reduces via F = L L' to the standard problem on L^-1 G L^-T and
    back-transforms the eigenvectors (u = L^-T w, rescaled to unit norm).
    Raises NotPositiveDefinite when F is not SPD; the failing pivot index
    identifies the offending column for callers that prune.
    """
    g = require_symmetric(g)
    f = require_square(f)
    if g.shape != f.shape:
        raise DimensionMismatch(f"pencil shapes {g.shape} and {f.shape}")
    lower = cholesky_factor(f)
    y = solve_lower_matrix(lower, g)
    c = solve_lower_matrix(lower, np.ascontiguousarray(y.T))
    c = 0.5 * (c + c.T)
    reduced = sym_eigen(c, max_sweeps=max_sweeps)
    n = g.shape[0]
    vectors = np.empty((n, n))
    for j in range(n):
        u = _kernels.solve_lower_trans(lower, np.ascontiguousarray(reduced.vectors[:, j]))
        nrm = float(np.linalg.norm(u))
        vectors[:, j] = u / nrm if nrm > 0.0 else u
    return EigenPairs(reduced.values, vectors)
