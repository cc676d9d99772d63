"""Harmonic Ritz extraction, basis refresh, sequence driving, diagnostics."""

import numpy as np
import pytest

from defcg.errors import BasisDeficient
from defcg.linalg import sym_eigen
from defcg.recycle import (
    SequenceState,
    condition_numbers,
    deflated_spectrum,
    harmonic_ritz_extract,
    refresh_basis,
    solve_next,
)
from defcg.solvers import SolverConfig, cg_solve, empty_basis

from conftest import random_spd


class TestHarmonicRitzExtract:
    def test_full_krylov_recovers_spectrum(self):
        a = np.diag([1.0, 2.0, 3.0])
        b = np.array([1.0, 1.0, 1.0])
        _, report, log = cg_solve(a, b, cfg=SolverConfig(tol=1e-14))
        assert log.stored_iterations == 3
        ext = harmonic_ritz_extract(log, None, 3)
        assert np.allclose(ext.theta, [1.0, 2.0, 3.0], atol=1e-8)

    def test_k_zero_empty(self, rng):
        a = random_spd(rng, 6)
        _, _, log = cg_solve(a, rng.standard_normal(6), cfg=SolverConfig(tol=1e-12))
        ext = harmonic_ritz_extract(log, None, 0)
        assert ext.theta.shape == (0,)
        assert ext.w_next.shape == (6, 0)

    def test_early_convergence_uses_actual_count(self, rng):
        # basis spanning 2 eigenvectors + a 2-iteration solve: Z gets 4 cols
        a = np.diag([1.0, 2.0, 50.0, 60.0, 70.0])
        basis = refresh_basis(a, np.eye(5)[:, [0, 1]])
        b = np.array([0.0, 0.0, 1.0, 1.0, 0.0])
        from defcg.solvers import deflated_cg_solve

        _, report, log = deflated_cg_solve(
            a, b, np.zeros(5), basis, SolverConfig(tol=1e-10, ell=12)
        )
        m = log.stored_iterations
        assert m == report.iterations < 12
        ext = harmonic_ritz_extract(log, basis, 2)
        assert ext.z.shape[1] == basis.k + m

    def test_selection_largest(self):
        a = np.diag([1.0, 2.0, 3.0, 4.0])
        b = np.ones(4)
        _, _, log = cg_solve(a, b, cfg=SolverConfig(tol=1e-14))
        ext = harmonic_ritz_extract(log, None, 2, selection="largest")
        assert np.allclose(ext.theta, [3.0, 4.0], atol=1e-7)

    def test_w_next_is_z_times_u(self, rng):
        a = random_spd(rng, 10)
        _, _, log = cg_solve(a, rng.standard_normal(10), cfg=SolverConfig(tol=1e-12))
        ext = harmonic_ritz_extract(log, None, 3)
        assert np.allclose(ext.w_next, ext.z @ ext.u, atol=1e-14)

    def test_requested_k_too_large(self, rng):
        a = random_spd(rng, 6)
        _, _, log = cg_solve(a, rng.standard_normal(6), cfg=SolverConfig(tol=1e-12))
        with pytest.raises(BasisDeficient):
            harmonic_ritz_extract(log, None, log.stored_iterations + 1)

    def test_invariant_subspace_recovery(self):
        # b supported on 3 coordinates of a diagonal matrix spans an exact
        # invariant subspace; extraction must find those eigenvalues.
        a = np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        b = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
        _, _, log = cg_solve(a, b, cfg=SolverConfig(tol=1e-13))
        ext = harmonic_ritz_extract(log, None, 3)
        assert np.allclose(ext.theta, [1.0, 2.0, 3.0], atol=1e-6)

    def test_ritz_vectors_satisfy_pencil_residual(self, rng):
        a = random_spd(rng, 12, kappa=50.0)
        _, _, log = cg_solve(a, rng.standard_normal(12), cfg=SolverConfig(tol=1e-12, ell=8))
        ext = harmonic_ritz_extract(log, None, 4)
        # each Ritz vector approximates an eigenvector within the captured
        # space: residual orthogonal to AZ by the Galerkin condition
        az = a @ ext.z
        for theta, u in zip(ext.theta, ext.u.T):
            v = ext.z @ u
            res = az.T @ (a @ v - theta * v)
            assert np.linalg.norm(res) <= 1e-6 * np.linalg.norm(a @ v)


class TestRefreshBasis:
    def test_single_column(self):
        basis = refresh_basis(np.diag([4.0, 5.0]), np.array([[1.0], [0.0]]))
        assert np.allclose(basis.aw, [[4.0], [0.0]], atol=1e-15)
        assert np.allclose(basis.gram_chol, [[2.0]], atol=1e-15)

    def test_duplicate_column_pruned(self, rng):
        a = random_spd(rng, 6)
        w = rng.standard_normal((6, 1))
        basis = refresh_basis(a, np.hstack([w, w]))
        assert basis.k == 1

    def test_eigenvector_basis_diagonal_gram(self, rng):
        a = random_spd(rng, 8)
        pairs = sym_eigen(a)
        w = pairs.vectors[:, :2]
        basis = refresh_basis(a, w)
        gram = basis.gram_chol @ basis.gram_chol.T
        assert np.allclose(gram, np.diag(pairs.values[:2]), atol=1e-10)

    def test_all_columns_pruned_raises(self):
        with pytest.raises(BasisDeficient):
            refresh_basis(np.eye(3), np.zeros((3, 2)))

    def test_empty_basis_passthrough(self):
        basis = refresh_basis(np.eye(3), np.empty((3, 0)))
        assert basis.k == 0

    def test_aw_consistency(self, rng):
        a = random_spd(rng, 9)
        w = rng.standard_normal((9, 3))
        basis = refresh_basis(a, w)
        for j in range(basis.k):
            expected = a @ basis.w[:, j]
            err = np.linalg.norm(basis.aw[:, j] - expected)
            assert err <= 1e-12 * np.linalg.norm(expected)


class TestSolveNext:
    def test_first_solve_equals_plain_cg(self, rng):
        a = random_spd(rng, 12)
        b = rng.standard_normal(12)
        cfg = SolverConfig(tol=1e-10)
        state = SequenceState(k=4, cfg=cfg)
        x, new_state = solve_next(state, a, b)
        x_ref, report_ref, _ = cg_solve(a, b, cfg=cfg)
        assert np.array_equal(x, x_ref)
        assert new_state.history[0].residual_history == report_ref.residual_history
        assert new_state.basis is not None

    def test_constant_sequence_recycling_helps(self):
        a = np.diag(np.arange(1.0, 41.0))
        b = np.ones(40)
        cfg = SolverConfig(tol=1e-8, ell=10)
        state = SequenceState(k=5, cfg=cfg)
        _, state = solve_next(state, a, b)
        _, state = solve_next(state, a, b)
        first, second = state.history
        assert second.iterations < first.iterations

    def test_k_zero_always_plain_cg(self, rng):
        a = random_spd(rng, 15)
        b = rng.standard_normal(15)
        cfg = SolverConfig(tol=1e-9)
        state = SequenceState(k=0, cfg=cfg)
        _, state = solve_next(state, a, b)
        _, state = solve_next(state, a, b)
        x_ref, report_ref, _ = cg_solve(a, b, cfg=cfg)
        x2_ref, report2_ref, _ = cg_solve(a, b, x0=x_ref, cfg=cfg)
        assert state.history[0].residual_history == report_ref.residual_history
        assert state.history[1].residual_history == report2_ref.residual_history

    def test_converged_solves_meet_tolerance(self, rng):
        cfg = SolverConfig(tol=1e-7)
        state = SequenceState(k=3, cfg=cfg)
        a = random_spd(rng, 20, kappa=1e3)
        for _ in range(3):
            jitter = 0.01 * random_spd(rng, 20, kappa=2.0)
            a = 0.5 * (a + a.T) + jitter
            b = rng.standard_normal(20)
            x, state = solve_next(state, a, b)
            rel = np.linalg.norm(b - a @ x) / np.linalg.norm(b)
            assert state.history[-1].converged
            assert rel <= 5.0 * cfg.tol

    def test_monotone_iterations_on_constant_sequence(self, rng):
        a = random_spd(rng, 30, kappa=1e4)
        b = rng.standard_normal(30)
        cfg = SolverConfig(tol=1e-8, ell=12)
        state = SequenceState(k=5, cfg=cfg)
        counts = []
        for _ in range(3):
            _, state = solve_next(state, a, b)
            counts.append(state.history[-1].iterations)
        assert counts[1] <= counts[0]

    def test_warm_start_carries_solution(self, rng):
        a = random_spd(rng, 10)
        b = rng.standard_normal(10)
        state = SequenceState(k=2, cfg=SolverConfig(tol=1e-10))
        x, state = solve_next(state, a, b)
        # same system again: warm start already satisfies the tolerance
        x2, state = solve_next(state, a, b)
        assert state.history[1].iterations <= 1


class TestDiagnostics:
    def test_condition_numbers_trivial(self):
        kappa, kappa_eff = condition_numbers(np.diag([1.0, 10.0]), 0)
        assert kappa == pytest.approx(10.0)
        assert kappa_eff == pytest.approx(10.0)

    def test_condition_numbers_deflated(self):
        kappa, kappa_eff = condition_numbers(np.diag([1.0, 2.0, 10.0]), 1)
        assert kappa == pytest.approx(10.0)
        assert kappa_eff == pytest.approx(5.0)

    def test_condition_numbers_random(self, rng):
        a = random_spd(rng, 8, kappa=100.0)
        values = sym_eigen(a).values
        kappa, kappa_eff = condition_numbers(a, 3)
        assert kappa == pytest.approx(values[-1] / values[0], rel=1e-10)
        assert kappa_eff == pytest.approx(values[-1] / values[3], rel=1e-10)

    def test_deflated_spectrum_single_eigenvector(self):
        a = np.diag([1.0, 2.0, 3.0])
        basis = refresh_basis(a, np.eye(3)[:, [2]])
        spectrum = deflated_spectrum(a, basis)
        assert np.allclose(spectrum, [0.0, 1.0, 2.0], atol=1e-10)

    def test_deflated_spectrum_empty_basis(self):
        a = np.diag([1.0, 2.0, 3.0])
        spectrum = deflated_spectrum(a, empty_basis(3))
        assert np.allclose(spectrum, [1.0, 2.0, 3.0], atol=1e-12)

    def test_deflated_spectrum_two_eigenvectors(self):
        a = np.diag([1.0, 2.0, 3.0])
        basis = refresh_basis(a, np.eye(3)[:, [0, 2]])
        spectrum = deflated_spectrum(a, basis)
        assert np.allclose(spectrum, [0.0, 0.0, 2.0], atol=1e-10)

    def test_deflated_spectrum_subset_property(self, rng):
        a = random_spd(rng, 9, kappa=50.0)
        pairs = sym_eigen(a)
        chosen = [1, 4, 7]
        basis = refresh_basis(a, pairs.vectors[:, chosen])
        expected = pairs.values.copy()
        expected[chosen] = 0.0
        spectrum = deflated_spectrum(a, basis)
        assert np.allclose(spectrum, np.sort(expected), atol=1e-8)


class TestRecyclingAccuracy:
    def test_exact_invariant_subspace_with_prev_basis(self, rng):
        # prev basis = two exact eigenvectors, solve restricted to three
        # other coordinates: combined space is invariant, extraction must
        # hit all five eigenvalues exactly.
        a = np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
        prev = refresh_basis(a, np.eye(7)[:, [0, 3]])
        b = np.zeros(7)
        b[[1, 4, 6]] = 1.0
        from defcg.solvers import deflated_cg_solve

        _, _, log = deflated_cg_solve(a, b, np.zeros(7), prev, SolverConfig(tol=1e-13))
        ext = harmonic_ritz_extract(log, prev, 5)
        assert np.allclose(np.sort(ext.theta), [1.0, 2.0, 4.0, 5.0, 7.0], atol=1e-6)
