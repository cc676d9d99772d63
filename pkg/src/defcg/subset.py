"""Random subset-of-data baseline for the cost/accuracy comparison.

Fits the Laplace approximation on a random size-m subset with direct
Cholesky solves, then induces the remaining latents from the conditional
mean K_(n-m)m K_mm^-1 f_m and scores the full training set with them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .gpc import laplace_newton, likelihood_derivs, rbf_cross_kernel, rbf_kernel
from .linalg import as_matrix, as_vector, cholesky_factor, cholesky_solve, matvec


@dataclass
class SubsetModel:
    """Fitted subset: chosen indices, kernel blocks and subset latents."""

    indices_m: np.ndarray
    rest_indices: np.ndarray
    k_mm: np.ndarray
    k_rest_m: np.ndarray
    f_m: np.ndarray

    @property
    def m(self):
        return self.indices_m.shape[0]

    @property
    def n(self):
        return self.indices_m.shape[0] + self.rest_indices.shape[0]


def fit_subset(x, y, fraction, params, newton_tol=1.0, seed=0, jitter=None, max_newton=30):
    """Fit the Laplace mode on a seeded uniform random subset.

    fraction is the subset share of the data; fraction * n must be at least
    one point. Returns (SubsetModel, newton records for the subset fit).
    """
    x = as_matrix(x)
    y = np.asarray(y)
    n = x.shape[0]
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
    if fraction * n < 1.0:
        raise ConfigError(f"fraction {fraction} selects no points from n={n}")
    m = min(n, max(1, int(round(fraction * n))))
    rng = np.random.default_rng(seed)
    indices = rng.choice(n, size=m, replace=False)
    rest = np.setdiff1d(np.arange(n), indices)

    k_mm = rbf_kernel(x[indices], params, jitter)
    state, records = laplace_newton(
        k_mm, y[indices], solver="cholesky", newton_tol=newton_tol, max_newton=max_newton
    )
    k_rest_m = rbf_cross_kernel(x[rest], x[indices], params) if rest.size else np.empty((0, m))
    model = SubsetModel(
        indices_m=indices,
        rest_indices=rest,
        k_mm=k_mm,
        k_rest_m=k_rest_m,
        f_m=state.f,
    )
    return model, records


def induce_latents(model, f_m=None):
    """Conditional-mean latents for the points outside the subset."""
    f_m = model.f_m if f_m is None else as_vector(f_m)
    if model.rest_indices.size == 0:
        return np.empty(0)
    lower = cholesky_factor(model.k_mm)
    return matvec(model.k_rest_m, cholesky_solve(lower, f_m))


def assemble_full_latents(model, f_m=None):
    """Full-length latent vector in original data order."""
    f_m = model.f_m if f_m is None else as_vector(f_m)
    f = np.empty(model.n)
    f[model.indices_m] = f_m
    if model.rest_indices.size:
        f[model.rest_indices] = induce_latents(model, f_m)
    return f


def evaluate_full(model, x, y):
    """log p(y|f) over all n points with subset + induced latents."""
    x = as_matrix(x)
    y = np.asarray(y)
    if x.shape[0] != y.shape[0] or y.shape[0] != model.n:
        raise ConfigError("data size does not match the fitted model")
    f = assemble_full_latents(model)
    loglik, _, _ = likelihood_derivs(f, y)
    return loglik
