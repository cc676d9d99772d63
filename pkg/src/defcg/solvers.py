"""Conjugate gradients and its deflated variant for dense SPD systems.

Both solvers share one iteration loop, so a deflated solve with an empty
basis executes exactly the same floating-point operations as plain CG and
produces bit-identical iterates. Residual convention: r = b - A x.

The deflated solver takes a RecycleBasis (W, AW, and the Cholesky factor of
W'AW). It starts from x0 = x_prev + W (W'AW)^-1 W' r_prev, keeps every
residual orthogonal to span{W}, and logs the quantities needed to extract
approximate eigenvectors afterwards: the first ell search directions and
residuals together with their step scalars.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import BreakdownZeroCurvature, DimensionMismatch, GramNotSpd, NotPositiveDefinite
from .linalg import as_matrix, as_vector, cholesky_factor, cholesky_solve, matvec, require_symmetric

TERM_CONVERGED = "converged"
TERM_MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule and logging window for the iterative solvers.

    tol is a relative-residual threshold ||r|| / ||b||. max_iters defaults
    to 10 n when left as None. ell is how many leading iterations to log.
    recompute_residual_every replaces the recurrence residual with the true
    residual b - A x at that cadence (0 disables it).
    """

    tol: float = 1e-5
    max_iters: int | None = None
    ell: int = 12
    recompute_residual_every: int = 50

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.ell < 0:
            raise ValueError("ell must be non-negative")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.recompute_residual_every < 0:
            raise ValueError("recompute_residual_every must be non-negative")


@dataclass
class KrylovLog:
    """Per-iteration quantities from the first min(ell, iterations) steps.

    p holds search directions p_0..p_{m-1}, r holds residuals r_0..r_m, so
    A p_j can be reconstructed as (r_j - r_{j+1}) / alpha_j without a
    matvec. mu is empty for plain CG.
    """

    d: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    beta: list = field(default_factory=list)
    mu: list = field(default_factory=list)
    p: list = field(default_factory=list)
    r: list = field(default_factory=list)

    @property
    def stored_iterations(self):
        return len(self.p)


@dataclass
class SolveReport:
    iterations: int
    residual_history: list
    converged: bool
    wall_time: float
    termination: str


@dataclass
class RecycleBasis:
    """Deflation space W with its image AW under the current system matrix.

    gram_chol caches the Cholesky factor of W'AW; it is computed on first
    use when not supplied. Columns of W must be linearly independent, which
    is exactly the condition for the factorization to succeed.
    """

    w: np.ndarray
    aw: np.ndarray
    gram_chol: np.ndarray | None = None

    def __post_init__(self):
        self.w = as_matrix(self.w)
        self.aw = as_matrix(self.aw)
        if self.w.shape != self.aw.shape:
            raise DimensionMismatch(f"W {self.w.shape} and AW {self.aw.shape} differ")

    @property
    def k(self):
        return self.w.shape[1]

    def ensure_factored(self):
        if self.gram_chol is None:
            gram = self.w.T @ self.aw
            gram = 0.5 * (gram + gram.T)
            try:
                self.gram_chol = cholesky_factor(gram)
            except NotPositiveDefinite as exc:
                raise GramNotSpd(f"W'AW not SPD (pivot {exc.pivot_index})") from exc
        return self.gram_chol


def empty_basis(n):
    return RecycleBasis(np.empty((n, 0)), np.empty((n, 0)), np.empty((0, 0)))


def _check_system(a, b, x0):
    a = require_symmetric(a)
    b = as_vector(b)
    x0 = as_vector(x0)
    if a.shape[0] != b.shape[0] or b.shape[0] != x0.shape[0]:
        raise DimensionMismatch(f"system shapes {a.shape}, {b.shape}, {x0.shape}")
    return a, b, x0


def _run_loop(a, b, x0, basis, cfg, t_start):
    """Shared CG / deflated-CG iteration; basis=None runs plain CG."""
    n = b.shape[0]
    max_iters = cfg.max_iters if cfg.max_iters is not None else 10 * n
    deflate = basis is not None and basis.k > 0
    if deflate:
        gram_chol = basis.ensure_factored()
        w = basis.w
        aw = basis.aw

    log = KrylovLog()
    norm_b = float(np.sqrt(b @ b))
    if norm_b == 0.0:
        x = np.zeros(n)
        log.r.append(np.zeros(n))
        report = SolveReport(0, [0.0], True, time.perf_counter() - t_start, TERM_CONVERGED)
        return x, report, log

    x = x0.copy()
    r = b - matvec(a, x)
    if deflate:
        mu_for_p = cholesky_solve(gram_chol, aw.T @ r)
        p = r - w @ mu_for_p
    else:
        mu_for_p = None
        p = r.copy()

    rr = float(r @ r)
    rel = np.sqrt(rr) / norm_b
    history = [rel]
    log.r.append(r.copy())

    it = 0
    while rel > cfg.tol and it < max_iters:
        if it < cfg.ell:
            log.p.append(p.copy())
            if deflate:
                log.mu.append(mu_for_p.copy())
        ap = matvec(a, p)
        d = float(p @ ap)
        if d <= 0.0:
            raise BreakdownZeroCurvature(it)
        alpha = rr / d
        x += alpha * p
        it += 1
        if cfg.recompute_residual_every and it % cfg.recompute_residual_every == 0:
            r = b - matvec(a, x)
        else:
            r = r - alpha * ap
        rr_new = float(r @ r)
        beta = rr_new / rr
        rel = np.sqrt(rr_new) / norm_b
        history.append(rel)
        if it - 1 < cfg.ell:
            log.d.append(d)
            log.alpha.append(alpha)
            log.beta.append(beta)
            log.r.append(r.copy())
        if deflate:
            mu_for_p = cholesky_solve(gram_chol, aw.T @ r)
            p = beta * p + r - w @ mu_for_p
        else:
            p = r + beta * p
        rr = rr_new

    converged = rel <= cfg.tol
    report = SolveReport(
        iterations=it,
        residual_history=history,
        converged=converged,
        wall_time=time.perf_counter() - t_start,
        termination=TERM_CONVERGED if converged else TERM_MAX_ITERS,
    )
    return x, report, log


def cg_solve(a, b, x0=None, cfg=None):
    """Standard conjugate gradients with relative-residual stopping.

    Returns (x, SolveReport, KrylovLog). The log covers the first
    min(cfg.ell, iterations) steps and has an empty mu list.
    """
    cfg = cfg or SolverConfig()
    b = as_vector(b)
    if x0 is None:
        x0 = np.zeros(b.shape[0])
    t0 = time.perf_counter()
    a, b, x0 = _check_system(a, b, x0)
    return _run_loop(a, b, x0, None, cfg, t0)


def deflated_cg_solve(a, b, x_prev, basis, cfg=None):
    """Deflated CG over the recycled space in ``basis``.

    The start iterate is x_prev corrected into the affine space where
    W' r = 0; every later residual stays orthogonal to span{W}. An empty
    basis reduces to cg_solve exactly (bit-identical iterates).
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    a, b, x_prev = _check_system(a, b, x_prev)
    if basis.k == 0:
        return _run_loop(a, b, x_prev, None, cfg, t0)
    if basis.w.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"basis rows {basis.w.shape[0]} vs system size {b.shape[0]}")
    gram_chol = basis.ensure_factored()
    r_prev = b - matvec(a, x_prev)
    x0 = x_prev + basis.w @ cholesky_solve(gram_chol, basis.w.T @ r_prev)
    return _run_loop(a, b, x0, basis, cfg, t0)


def apply_deflation_projector(a, basis, v):
    """Apply P_W = I - AW (W'AW)^-1 W' to ``v``.

    ``basis`` must carry AW for this ``a`` (see recycle.refresh_basis).
    """
    a = as_matrix(a)
    v = as_vector(v)
    if a.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"matrix {a.shape} vs vector size {v.shape[0]}")
    if basis.k == 0:
        return v.copy()
    if basis.w.shape[0] != v.shape[0]:
        raise DimensionMismatch(f"basis rows {basis.w.shape[0]} vs vector size {v.shape[0]}")
    gram_chol = basis.ensure_factored()
    return v - basis.aw @ cholesky_solve(gram_chol, basis.w.T @ v)
