"""Dense linear algebra: Cholesky, Jacobi eigensolver, generalized pencil."""

import numpy as np
import pytest

from defcg.errors import DimensionMismatch, NotPositiveDefinite
from defcg.linalg import (
    cholesky_factor,
    cholesky_solve,
    gemm,
    gen_sym_eigen,
    matvec,
    require_symmetric,
    sym_eigen,
)

from conftest import gauss_solve, random_spd


class TestCholesky:
    def test_identity(self):
        lower = cholesky_factor(np.eye(3))
        assert np.array_equal(lower, np.eye(3))

    def test_hand_factorization(self):
        lower = cholesky_factor(np.array([[4.0, 2.0], [2.0, 5.0]]))
        assert np.allclose(lower, [[2.0, 0.0], [1.0, 2.0]], atol=1e-15)
        assert np.allclose(lower @ lower.T, [[4.0, 2.0], [2.0, 5.0]], atol=1e-15)

    def test_indefinite_reports_pivot(self):
        with pytest.raises(NotPositiveDefinite) as err:
            cholesky_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert err.value.pivot_index == 1

    def test_reconstruction_random(self, rng):
        for n in (2, 5, 17):
            a = random_spd(rng, n, kappa=1e4)
            lower = cholesky_factor(a)
            err = np.max(np.abs(lower @ lower.T - a))
            assert err <= 1e-10 * np.max(np.abs(a))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            cholesky_factor(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatch):
            cholesky_factor(np.ones((2, 3)))


class TestCholeskySolve:
    def test_identity(self):
        lower = cholesky_factor(np.eye(3))
        assert np.array_equal(cholesky_solve(lower, np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])

    def test_closed_form_2x2(self):
        lower = cholesky_factor(np.array([[4.0, 1.0], [1.0, 3.0]]))
        x = cholesky_solve(lower, np.array([1.0, 2.0]))
        assert np.allclose(x, [1.0 / 11.0, 7.0 / 11.0], rtol=1e-14)

    def test_closed_form_2x2_other(self):
        lower = cholesky_factor(np.array([[4.0, 2.0], [2.0, 5.0]]))
        x = cholesky_solve(lower, np.array([8.0, 9.0]))
        assert np.allclose(x, [11.0 / 8.0, 5.0 / 4.0], rtol=1e-14)

    def test_matches_gaussian_elimination(self, rng):
        for n in (3, 10, 50):
            a = random_spd(rng, n, kappa=1e3)
            b = rng.standard_normal(n)
            x = cholesky_solve(cholesky_factor(a), b)
            ref = gauss_solve(a, b)
            assert np.linalg.norm(x - ref) <= 1e-9 * np.linalg.norm(ref)

    def test_residual_bound(self, rng):
        a = random_spd(rng, 40, kappa=1e6)
        b = rng.standard_normal(40)
        x = cholesky_solve(cholesky_factor(a), b)
        assert np.linalg.norm(b - a @ x) <= 1e-10 * np.linalg.norm(b)

    def test_dimension_mismatch(self):
        lower = cholesky_factor(np.eye(3))
        with pytest.raises(DimensionMismatch):
            cholesky_solve(lower, np.ones(4))


class TestSymEigen:
    def test_diagonal_sorted(self):
        pairs = sym_eigen(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(pairs.values, [1.0, 2.0, 3.0], atol=1e-14)
        # permuted identity columns, up to sign
        assert np.allclose(np.abs(pairs.vectors), np.eye(3)[:, [1, 2, 0]], atol=1e-14)

    def test_2x2_hand(self):
        pairs = sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(pairs.values, [1.0, 3.0], atol=1e-14)
        s = 1.0 / np.sqrt(2.0)
        for col, expected in zip(pairs.vectors.T, ([s, -s], [s, s])):
            assert min(np.linalg.norm(col - expected), np.linalg.norm(col + expected)) < 1e-12

    def test_reconstruction(self, rng):
        a = random_spd(rng, 5, kappa=50.0)
        pairs = sym_eigen(a)
        recon = pairs.vectors @ np.diag(pairs.values) @ pairs.vectors.T
        assert np.max(np.abs(recon - a)) <= 1e-10 * np.max(np.abs(a))

    def test_trace_and_det_invariants(self, rng):
        a = random_spd(rng, 8, kappa=100.0)
        pairs = sym_eigen(a)
        assert abs(np.sum(pairs.values) - np.trace(a)) <= 1e-10 * abs(np.trace(a))
        lower = cholesky_factor(a)
        det = np.prod(np.diag(lower)) ** 2
        assert abs(np.prod(pairs.values) - det) <= 1e-8 * abs(det)

    def test_orthonormal_vectors(self, rng):
        a = random_spd(rng, 9)
        v = sym_eigen(a).vectors
        assert np.max(np.abs(v.T @ v - np.eye(9))) < 1e-12

    def test_residual_per_pair(self, rng):
        a = random_spd(rng, 12, kappa=1e4)
        pairs = sym_eigen(a)
        for value, vector in zip(pairs.values, pairs.vectors.T):
            res = np.linalg.norm(a @ vector - value * vector)
            assert res <= 1e-8 * np.max(np.abs(a)) * np.sqrt(12)


class TestGenSymEigen:
    def test_identity_f_reduces_to_standard(self):
        pairs = gen_sym_eigen(np.diag([1.0, 2.0]), np.eye(2))
        assert np.allclose(pairs.values, [1.0, 2.0], atol=1e-14)

    def test_diagonal_ratios(self):
        pairs = gen_sym_eigen(np.diag([8.0, 3.0]), np.diag([4.0, 1.0]))
        assert np.allclose(pairs.values, [2.0, 3.0], atol=1e-13)

    def test_singular_f_raises(self):
        with pytest.raises(NotPositiveDefinite):
            gen_sym_eigen(np.eye(2), np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_matches_standard_on_identity_f(self, rng):
        g = random_spd(rng, 6)
        gen = gen_sym_eigen(g, np.eye(6))
        std = sym_eigen(g)
        assert np.allclose(gen.values, std.values, atol=1e-10)
        for u, v in zip(gen.vectors.T, std.vectors.T):
            assert min(np.linalg.norm(u - v), np.linalg.norm(u + v)) < 1e-10

    def test_generalized_residual(self, rng):
        g = random_spd(rng, 7, kappa=30.0)
        f = random_spd(rng, 7, kappa=10.0)
        pairs = gen_sym_eigen(g, f)
        for theta, u in zip(pairs.values, pairs.vectors.T):
            res = np.linalg.norm(g @ u - theta * (f @ u))
            bound = 1e-8 * (np.max(np.abs(g)) + abs(theta) * np.max(np.abs(f)))
            assert res <= bound


class TestProducts:
    def test_matvec_identity(self):
        assert np.array_equal(matvec(np.eye(3), np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])

    def test_matvec_diagonal(self):
        assert np.array_equal(matvec(np.diag([2.0, 3.0]), np.array([1.0, 1.0])), [2.0, 3.0])

    def test_matvec_round_trip(self):
        a = np.array([[4.0, 1.0], [1.0, 3.0]])
        x = np.array([1.0 / 11.0, 7.0 / 11.0])
        assert np.allclose(matvec(a, x), [1.0, 2.0], rtol=1e-14)

    def test_gemm_small(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        y = np.array([[5.0, 6.0], [7.0, 8.0]])
        assert np.array_equal(gemm(x, y), x @ y)

    def test_determinism_bitwise(self, rng):
        a = rng.standard_normal((40, 40))
        v = rng.standard_normal(40)
        assert np.array_equal(matvec(a, v), matvec(a, v))
        b = rng.standard_normal((40, 40))
        assert np.array_equal(gemm(a, b), gemm(a, b))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            matvec(np.eye(3), np.ones(4))
        with pytest.raises(DimensionMismatch):
            gemm(np.ones((2, 3)), np.ones((2, 3)))


def test_require_symmetric_tolerance():
    a = np.array([[1.0, 1.0], [1.0 + 1e-16, 1.0]])
    require_symmetric(a)
    with pytest.raises(ValueError):
        require_symmetric(np.array([[1.0, 1.0], [1.5, 1.0]]))
