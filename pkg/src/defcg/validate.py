"""Quick self-checks of the core invariants on small random instances.

Backs the `defcg validate` subcommand. Each check returns (name, ok,
detail); all of them together take well under a second.
"""

from __future__ import annotations

import numpy as np

from . import linalg, recycle, solvers
from .gpc import build_newton_system, likelihood_derivs, make_state, psi_objective, rbf_kernel, KernelParams


def _random_spd(rng, n, spread=10.0):
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    values = np.exp(rng.uniform(0.0, np.log(spread), size=n))
    return q @ np.diag(values) @ q.T


def run_all(seed=0):
    rng = np.random.default_rng(seed)
    results = []

    def check(name, ok, detail=""):
        results.append((name, bool(ok), detail))

    # Solver agreement against the direct factorization.
    a = _random_spd(rng, 30, spread=1e4)
    a = 0.5 * (a + a.T)
    b = rng.standard_normal(30)
    x_ref = linalg.cholesky_solve(linalg.cholesky_factor(a), b)
    cfg = solvers.SolverConfig(tol=1e-12)
    x_cg, rep, log = solvers.cg_solve(a, b, cfg=cfg)
    err = np.linalg.norm(x_cg - x_ref) / np.linalg.norm(x_ref)
    check("cg matches cholesky", rep.converged and err < 1e-9, f"rel err {err:.2e}")

    w = np.linalg.qr(rng.standard_normal((30, 4)))[0]
    basis = recycle.refresh_basis(a, w)
    x_def, rep_def, log_def = solvers.deflated_cg_solve(a, b, np.zeros(30), basis, cfg)
    err = np.linalg.norm(x_def - x_ref) / np.linalg.norm(x_ref)
    check("def-cg matches cholesky", rep_def.converged and err < 1e-9, f"rel err {err:.2e}")

    # Deflation keeps residuals orthogonal to the basis.
    worst = max(
        float(np.max(np.abs(basis.w.T @ r))) / float(np.linalg.norm(log_def.r[0]))
        for r in log_def.r
    )
    check("deflation orthogonality", worst < 1e-8, f"max |W'r|/||r0|| = {worst:.2e}")

    # Empty basis reduces def-CG to CG bit for bit.
    x_red, rep_red, _ = solvers.deflated_cg_solve(a, b, np.zeros(30), solvers.empty_basis(30), cfg)
    identical = rep_red.residual_history == rep.residual_history and np.array_equal(x_red, x_cg)
    check("k=0 reduction is exact", identical)

    # Eigensolver reconstruction.
    pairs = linalg.sym_eigen(a)
    recon = pairs.vectors @ np.diag(pairs.values) @ pairs.vectors.T
    err = np.max(np.abs(recon - a)) / np.max(np.abs(a))
    check("jacobi eigen reconstruction", err < 1e-10, f"rel err {err:.2e}")

    # Exact-eigenvector deflation zeroes the chosen part of the spectrum.
    small = np.diag(np.arange(1.0, 7.0))
    basis_exact = recycle.refresh_basis(small, np.eye(6)[:, [3, 5]])
    spectrum = recycle.deflated_spectrum(small, basis_exact)
    expected = np.sort(np.array([1.0, 2.0, 3.0, 0.0, 5.0, 0.0]))
    err = np.max(np.abs(spectrum - expected))
    check("deflated spectrum zeroing", err < 1e-8, f"max err {err:.2e}")

    # Determinism of the backend products.
    v = rng.standard_normal(30)
    check("matvec determinism", np.array_equal(linalg.matvec(a, v), linalg.matvec(a, v)))

    # GPC: curvature bounds, eigenvalue floor, gradient consistency.
    x_data = rng.standard_normal((12, 2))
    y = np.where(rng.standard_normal(12) > 0, 1, -1)
    kernel = rbf_kernel(x_data, KernelParams(1.0, 1.0))
    state = make_state(kernel, y, f=rng.standard_normal(12))
    ok_h = np.all(state.h > 0.0) and np.all(state.h <= 0.25)
    check("curvature bounds", ok_h)
    system = build_newton_system(state)
    floor = linalg.sym_eigen(system.a_matrix).values[0]
    check("newton system eigenvalue floor", floor >= 1.0 - 1e-8, f"lambda_min = {floor:.12g}")

    lower = linalg.cholesky_factor(kernel)
    eps = 1e-6
    grad_analytic = state.grad_loglik - state.a
    worst = 0.0
    for i in range(4):
        e = np.zeros(12)
        e[i] = eps
        f_hi = state.f + e
        f_lo = state.f - e
        psi_hi = likelihood_derivs(f_hi, y)[0] - 0.5 * float(
            f_hi @ linalg.cholesky_solve(lower, f_hi)
        )
        psi_lo = likelihood_derivs(f_lo, y)[0] - 0.5 * float(
            f_lo @ linalg.cholesky_solve(lower, f_lo)
        )
        fd = (psi_hi - psi_lo) / (2.0 * eps)
        worst = max(worst, abs(fd - grad_analytic[i]) / max(abs(grad_analytic[i]), 1e-12))
    check("objective gradient vs finite differences", worst < 1e-5, f"rel err {worst:.2e}")

    state0 = make_state(kernel, y)
    check(
        "psi at zero latents",
        abs(psi_objective(state0) + 12 * np.log(2.0)) < 1e-12,
    )

    return results


def main(seed=0, out=print):
    results = run_all(seed)
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        out(f"[{status}] {name}{suffix}")
        failed += 0 if ok else 1
    out(f"{len(results) - failed}/{len(results)} checks passed")
    return failed == 0
