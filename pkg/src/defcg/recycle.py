"""Subspace recycling: harmonic Ritz extraction and solver-sequence driving.

After a solve finishes, the logged search directions p_0..p_{m-1} together
with the previous basis W form Z = [W, P_m]. Images under A come for free:
AW is stored and A p_j = (r_j - r_{j+1}) / alpha_j falls out of the residual
recurrence. The harmonic pencil F = (AZ)'Z, G = (AZ)'(AZ) then yields
G u = theta F u, and the k selected Ritz vectors Z U become the next
deflation basis.

Z columns are rescaled to unit norm before the projection (p_j norms decay
by orders of magnitude as CG converges, which would otherwise wreck the
conditioning of F); this changes nothing about the extracted space. The
selected u are rescaled so each Ritz vector Z u has unit norm, and
W_next = Z U is formed from the rescaled U, keeping the identity exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BasisDeficient, NotPositiveDefinite
from .linalg import as_matrix, cholesky_factor, cholesky_solve_matrix, gemm, gen_sym_eigen, require_symmetric, sym_eigen
from .solvers import RecycleBasis, SolverConfig, cg_solve, deflated_cg_solve

SELECT_SMALLEST = "smallest"
SELECT_LARGEST = "largest"


@dataclass
class RitzExtraction:
    """Harmonic Ritz values/vectors chosen for the next deflation basis.

    theta holds the k selected values (ascending); u the matching
    coefficient columns over z; w_next = z @ u. aw_next = (az) @ u is the
    image of w_next under the matrix the log came from, obtained without
    further matvecs; it is only valid while that matrix is unchanged.
    """

    theta: np.ndarray
    u: np.ndarray
    z: np.ndarray
    w_next: np.ndarray
    aw_next: np.ndarray
    selection: str


@dataclass
class SequenceState:
    """Carry-over state between solves of a system sequence.

    basis is None until a first solve has produced one (use refresh_basis to
    seed it when eigenvector knowledge exists up front). x_last warm-starts
    the next solve.
    """

    k: int
    cfg: SolverConfig = field(default_factory=SolverConfig)
    selection: str = SELECT_SMALLEST
    basis: RecycleBasis | None = None
    x_last: np.ndarray | None = None
    history: list = field(default_factory=list)


def _factor_with_pruning(w, aw):
    """Cholesky of W'AW, dropping the column at any failing pivot."""
    while True:
        if w.shape[1] == 0:
            raise BasisDeficient(0)
        gram = w.T @ aw
        gram = 0.5 * (gram + gram.T)
        try:
            return w, aw, cholesky_factor(gram)
        except NotPositiveDefinite as exc:
            w = np.delete(w, exc.pivot_index, axis=1)
            aw = np.delete(aw, exc.pivot_index, axis=1)


def refresh_basis(a_next, w):
    """Rebuild a RecycleBasis for a new system matrix.

    Recomputes AW against a_next and factors W'AW, pruning dependent
    columns (k may shrink). Raises BasisDeficient(0) if nothing survives.
    """
    a_next = require_symmetric(a_next)
    w = as_matrix(w)
    if w.shape[1] == 0:
        return RecycleBasis(w, w.copy(), np.empty((0, 0)))
    aw = gemm(a_next, w)
    w, aw, gram_chol = _factor_with_pruning(w, aw)
    return RecycleBasis(w, aw, gram_chol)


def harmonic_ritz_extract(log, prev_basis, k, selection=SELECT_SMALLEST):
    """Extract k approximate eigenvectors from a finished solve.

    log supplies the stored directions/residuals; prev_basis (may be None)
    contributes its columns to Z. Raises BasisDeficient when fewer than k
    independent columns are available, before or after pruning.
    """
    if selection not in (SELECT_SMALLEST, SELECT_LARGEST):
        raise ValueError(f"unknown selection {selection!r}")
    m = log.stored_iterations
    k_prev = prev_basis.k if prev_basis is not None else 0
    total = k_prev + m
    if k > total:
        raise BasisDeficient(total)

    n = log.r[0].shape[0]
    if k == 0:
        empty = np.empty((n, 0))
        return RitzExtraction(np.empty(0), np.empty((total, 0)), empty, empty, empty.copy(), selection)

    z = np.empty((n, total))
    az = np.empty((n, total))
    for j in range(k_prev):
        z[:, j] = prev_basis.w[:, j]
        az[:, j] = prev_basis.aw[:, j]
    for j in range(m):
        z[:, k_prev + j] = log.p[j]
        az[:, k_prev + j] = (log.r[j] - log.r[j + 1]) / log.alpha[j]

    # Unit-norm columns; zero columns are dropped outright.
    norms = np.linalg.norm(z, axis=0)
    keep = norms > 0.0
    z = z[:, keep] / norms[keep]
    az = az[:, keep] / norms[keep]

    while True:
        if z.shape[1] < k:
            raise BasisDeficient(z.shape[1])
        f = az.T @ z
        f = 0.5 * (f + f.T)
        g = az.T @ az
        g = 0.5 * (g + g.T)
        try:
            pairs = gen_sym_eigen(g, f)
            break
        except NotPositiveDefinite as exc:
            z = np.delete(z, exc.pivot_index, axis=1)
            az = np.delete(az, exc.pivot_index, axis=1)

    if selection == SELECT_SMALLEST:
        idx = np.arange(k)
    else:
        idx = np.arange(pairs.values.shape[0] - k, pairs.values.shape[0])
    theta = pairs.values[idx].copy()
    u = pairs.vectors[:, idx].copy()
    for j in range(k):
        scale = float(np.linalg.norm(z @ u[:, j]))
        if scale > 0.0:
            u[:, j] /= scale
    z = np.ascontiguousarray(z)
    az = np.ascontiguousarray(az)
    u = np.ascontiguousarray(u)
    w_next = gemm(z, u)
    aw_next = gemm(az, u)
    return RitzExtraction(theta, u, z, w_next, aw_next, selection)


def solve_next(state, a, b):
    """Solve the next system in a sequence, recycling the deflation basis.

    Plain CG handles the first system (or any system where the basis has
    degenerated); otherwise the basis is refreshed for this matrix and
    deflated CG runs warm-started from the previous solution. Either way the
    finished log is mined for the next basis. Returns (x, new_state).
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    n = b.shape[0]
    x_prev = state.x_last if state.x_last is not None else np.zeros(n)

    basis_used = None
    if state.basis is not None and state.basis.k > 0:
        try:
            basis_used = refresh_basis(a, state.basis.w)
        except BasisDeficient:
            basis_used = None

    if basis_used is not None:
        x, report, log = deflated_cg_solve(a, b, x_prev, basis_used, state.cfg)
    else:
        x, report, log = cg_solve(a, b, x_prev, state.cfg)

    next_basis = None
    if state.k > 0:
        try:
            extraction = harmonic_ritz_extract(log, basis_used, state.k, state.selection)
            if extraction.w_next.shape[1] > 0:
                # AW via the within-system identity; the next call's
                # refresh_basis recomputes it for the new matrix anyway.
                next_basis = RecycleBasis(extraction.w_next, extraction.aw_next)
        except BasisDeficient:
            next_basis = None

    new_state = replace(
        state,
        basis=next_basis,
        x_last=x,
        history=state.history + [report],
    )
    return x, new_state


def condition_numbers(a, k):
    """(kappa, kappa_eff) = (lambda_n / lambda_1, lambda_n / lambda_{k+1})."""
    a = require_symmetric(a)
    if not 0 <= k < a.shape[0]:
        raise ValueError(f"k must be in [0, n), got {k}")
    values = sym_eigen(a).values
    return float(values[-1] / values[0]), float(values[-1] / values[k])


def deflated_spectrum(a, basis):
    """Eigenvalues (ascending) of the deflated operator P_W A.

    Forms the explicit n x n product; meant for small diagnostic problems.
    When W spans exact eigenvectors the product is symmetric and the
    spectrum is just A's with the deflated eigenvalues replaced by zero.
    """
    a = require_symmetric(a)
    if basis.k == 0:
        return sym_eigen(a).values
    gram_chol = basis.ensure_factored()
    m = a - basis.aw @ cholesky_solve_matrix(gram_chol, basis.w.T @ a)
    scale = max(float(np.max(np.abs(m))), 1e-300)
    if float(np.max(np.abs(m - m.T))) <= 1e-8 * scale:
        return sym_eigen(0.5 * (m + m.T)).values
    values = np.linalg.eigvals(m)
    return np.sort(values.real)
