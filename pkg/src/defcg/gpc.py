"""Gaussian-process binary classification via the Laplace approximation.

Logistic likelihood p(y_i | f_i) = sigmoid(y_i f_i) with labels in {-1, +1}.
Each Newton step for the latent posterior mode solves the restructured SPD
system

    (I + H^1/2 K H^1/2) x = H^1/2 K (H f + grad)      H = diag curvature,

whose eigenvalues live in [1, 1 + lambda_max(K)/4], followed by
a_new = (H f + grad) - H^1/2 x and f_new = K a_new. The tracked objective
is psi = log p(y|f) - f'a / 2 (the f-dependent terms only; the log-det and
constant terms never change inside the Newton loop).

The linear solves are pluggable: direct Cholesky, plain CG, or deflated CG
whose basis is recycled across Newton iterations via recycle.solve_next.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidLabel, NoProgress, StateInconsistent
from .linalg import as_matrix, as_vector, cholesky_factor, cholesky_solve, matvec
from .recycle import SELECT_LARGEST, SequenceState, solve_next
from .solvers import SolverConfig, cg_solve

SOLVER_CHOLESKY = "cholesky"
SOLVER_CG = "cg"
SOLVER_DEFCG = "defcg"


@dataclass(frozen=True)
class KernelParams:
    """RBF kernel k(x, x') = signal_sd^2 exp(-||x - x'||^2 / (2 lengthscale^2))."""

    signal_sd: float = 1.0
    lengthscale: float = 1.0

    def __post_init__(self):
        if self.signal_sd <= 0.0 or self.lengthscale <= 0.0:
            raise ValueError("signal_sd and lengthscale must be positive")


@dataclass
class GpcState:
    """Latent state with cached likelihood derivatives (valid for f)."""

    f: np.ndarray
    y: np.ndarray
    k_matrix: np.ndarray
    a: np.ndarray
    loglik: float
    grad_loglik: np.ndarray
    h: np.ndarray


@dataclass
class NewtonSystem:
    a_matrix: np.ndarray
    b: np.ndarray
    sqrt_h: np.ndarray


@dataclass
class NewtonRecord:
    """One Newton iteration: objective, solver effort, latent snapshot."""

    newton_iter: int
    psi: float
    loglik: float
    solver_iterations: int | None
    rel_residual: float
    solve_time_s: float
    residual_history: list
    f: np.ndarray


def rbf_kernel(x, params, jitter=None):
    """Dense RBF Gram matrix with jitter added to the diagonal.

    jitter defaults to 1e-8 * signal_sd^2 so the result stays factorable.
    The diagonal is exactly signal_sd^2 + jitter and the matrix is exactly
    symmetric by construction.
    """
    x = as_matrix(x)
    if not np.all(np.isfinite(x)):
        raise ValueError("data matrix contains non-finite entries")
    var = params.signal_sd**2
    if jitter is None:
        jitter = 1e-8 * var
    if jitter < 0.0:
        raise ValueError("jitter must be non-negative")
    inv_two_ell2 = 1.0 / (2.0 * params.lengthscale**2)
    return _kernels.rbf_gram(x, var, inv_two_ell2, float(jitter))


def rbf_cross_kernel(xa, xb, params):
    """Cross-kernel block between two point sets (no jitter)."""
    xa = as_matrix(xa)
    xb = as_matrix(xb)
    var = params.signal_sd**2
    inv_two_ell2 = 1.0 / (2.0 * params.lengthscale**2)
    return _kernels.rbf_cross(xa, xb, var, inv_two_ell2)


def median_lengthscale(x, max_points=512):
    """Median pairwise distance over an evenly spaced subsample."""
    x = as_matrix(x)
    n = x.shape[0]
    if n < 2:
        return 1.0
    idx = np.unique(np.linspace(0, n - 1, min(n, max_points)).astype(int))
    sub = x[idx]
    sq = np.einsum("ij,ij->i", sub, sub)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (sub @ sub.T)
    np.maximum(d2, 0.0, out=d2)
    tri = d2[np.triu_indices(len(sub), k=1)]
    med = float(np.sqrt(np.median(tri)))
    return med if med > 0.0 else 1.0


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def check_labels(y):
    y = np.asarray(y)
    if y.ndim != 1 or not np.all(np.isin(y, (-1, 1))):
        raise InvalidLabel("labels must be a vector of -1/+1")
    return y.astype(np.float64)


def likelihood_derivs(f, y):
    """(log-likelihood, gradient, curvature diagonal) of the logistic model.

    Overflow-safe for large |f|: log sigmoid goes through logaddexp and the
    curvature is computed as sigmoid(f) * sigmoid(-f) so both factors stay
    in their stable branch.
    """
    f = as_vector(f)
    y = check_labels(y)
    if f.shape != y.shape:
        raise InvalidLabel("f and y must have the same length")
    loglik = float(-np.sum(np.logaddexp(0.0, -y * f)))
    pi = _sigmoid(f)
    grad = (y + 1.0) * 0.5 - pi
    h = pi * _sigmoid(-f)
    return loglik, grad, h


def make_state(k_matrix, y, f=None):
    """Fresh GpcState; f defaults to zero. A given f implies a = K^-1 f."""
    k_matrix = as_matrix(k_matrix)
    y = check_labels(y)
    n = y.shape[0]
    if f is None:
        f = np.zeros(n)
        a = np.zeros(n)
    else:
        f = as_vector(f)
        a = cholesky_solve(cholesky_factor(k_matrix), f)
    loglik, grad, h = likelihood_derivs(f, y)
    return GpcState(f=f, y=y, k_matrix=k_matrix, a=a, loglik=loglik, grad_loglik=grad, h=h)


def build_newton_system(state):
    """Assemble A = I + H^1/2 K H^1/2 and b = H^1/2 K (H f + grad)."""
    sqrt_h = np.sqrt(state.h)
    a_matrix = state.k_matrix * np.outer(sqrt_h, sqrt_h)
    idx = np.arange(a_matrix.shape[0])
    a_matrix[idx, idx] += 1.0
    inner = state.h * state.f + state.grad_loglik
    b = sqrt_h * matvec(state.k_matrix, inner)
    return NewtonSystem(a_matrix=a_matrix, b=b, sqrt_h=sqrt_h)


def newton_update(state, x):
    """Advance the latent state given the solution x of the Newton system."""
    x = as_vector(x)
    inner = state.h * state.f + state.grad_loglik
    a_new = inner - np.sqrt(state.h) * x
    f_new = matvec(state.k_matrix, a_new)
    loglik, grad, h = likelihood_derivs(f_new, state.y)
    return GpcState(
        f=f_new,
        y=state.y,
        k_matrix=state.k_matrix,
        a=a_new,
        loglik=loglik,
        grad_loglik=grad,
        h=h,
    )


def psi_objective(state):
    """Tracked objective psi = log p(y|f) - f'a / 2, requiring f = K a."""
    err = float(np.linalg.norm(state.f - matvec(state.k_matrix, state.a)))
    if err > 1e-8 * float(np.linalg.norm(state.f)):
        raise StateInconsistent(f"||f - K a|| = {err:g}")
    return state.loglik - 0.5 * float(state.f @ state.a)


def laplace_newton(
    k_matrix,
    y,
    solver=SOLVER_CHOLESKY,
    cfg=None,
    newton_tol=1.0,
    max_newton=30,
    k=8,
    selection=SELECT_LARGEST,
):
    """Newton iteration for the posterior mode, from f = 0.

    Stops once the objective gain drops below newton_tol (or at max_newton).
    solver picks how each SPD system is solved; "defcg" threads a recycled
    deflation basis of size k through the sequence (selection defaults to
    the largest Ritz values: these Newton systems have their small
    eigenvalues clustered at 1, so only the top of the spectrum is worth
    deflating). Raises NoProgress if the objective ever drops by more than
    1e-6, which signals solves too loose for the Newton step to be trusted.

    Returns (final state, list of NewtonRecord).
    """
    if solver not in (SOLVER_CHOLESKY, SOLVER_CG, SOLVER_DEFCG):
        raise ValueError(f"unknown solver {solver!r}")
    cfg = cfg or SolverConfig()
    state = make_state(k_matrix, y)
    n = state.y.shape[0]
    psi_prev = psi_objective(state)
    records = []
    seq = SequenceState(k=k, cfg=cfg, selection=selection)
    x_prev = np.zeros(n)

    for it in range(1, max_newton + 1):
        system = build_newton_system(state)
        t0 = time.perf_counter()
        if solver == SOLVER_CHOLESKY:
            lower = cholesky_factor(system.a_matrix)
            x = cholesky_solve(lower, system.b)
            dt = time.perf_counter() - t0
            solver_iterations = None
            history = []
            norm_b = float(np.linalg.norm(system.b))
            resid = float(np.linalg.norm(system.b - matvec(system.a_matrix, x)))
            rel_residual = resid / norm_b if norm_b > 0.0 else 0.0
        elif solver == SOLVER_CG:
            x, report, _ = cg_solve(system.a_matrix, system.b, x_prev, cfg)
            dt = time.perf_counter() - t0
            solver_iterations = report.iterations
            history = report.residual_history
            rel_residual = history[-1]
        else:
            x, seq = solve_next(seq, system.a_matrix, system.b)
            dt = time.perf_counter() - t0
            report = seq.history[-1]
            solver_iterations = report.iterations
            history = report.residual_history
            rel_residual = history[-1]

        state = newton_update(state, x)
        psi = psi_objective(state)
        records.append(
            NewtonRecord(
                newton_iter=it,
                psi=psi,
                loglik=state.loglik,
                solver_iterations=solver_iterations,
                rel_residual=rel_residual,
                solve_time_s=dt,
                residual_history=list(history),
                f=state.f.copy(),
            )
        )
        if psi < psi_prev - 1e-6:
            raise NoProgress(f"objective fell from {psi_prev:.9g} to {psi:.9g} at iteration {it}")
        if psi - psi_prev < newton_tol:
            break
        psi_prev = psi
        x_prev = x

    return state, records
