"""Shared helpers: random SPD instances and independent solve oracles."""

import numpy as np
import pytest


def random_spd(rng, n, kappa=100.0):
    """Random SPD matrix with eigenvalues log-spaced in [1, kappa]."""
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    values = np.logspace(0.0, np.log10(kappa), n)
    a = q @ np.diag(values) @ q.T
    return 0.5 * (a + a.T)


def gauss_solve(a, b):
    """Gaussian elimination with partial pivoting; oracle independent of
    the package's factorizations."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = a.shape[0]
    aug = np.hstack([a, b[:, None]])
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(aug[col:, col])))
        if aug[pivot, col] == 0.0:
            raise ZeroDivisionError("singular matrix in oracle")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        for row in range(col + 1, n):
            factor = aug[row, col] / aug[col, col]
            aug[row, col:] -= factor * aug[col, col:]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (aug[row, n] - aug[row, row + 1 : n] @ x[row + 1 : n]) / aug[row, row]
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
