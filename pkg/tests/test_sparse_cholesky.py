#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 30, 2025 11:20:05$"

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from recinla.engine.domain.gmrf import build_rw1_precision
from recinla.engine.domain.model.errors import FactorizationError, ModelValidationError
from recinla.engine.domain.model.sparse import SparseSymmetric
from recinla.engine.infrastructure.service.linalg.cholesky import SparseCholeskySolver


def random_spd(n: int, density: float, rng_seed: int) -> SparseSymmetric:
    rng = np.random.default_rng(rng_seed)
    a = sp.random(n, n, density=density, random_state=rng, format="csc")
    q = a @ a.T + sp.diags(1.0 + rng.uniform(0.0, 1.0, n))
    return SparseSymmetric.from_matrix(q)


class TestSparseSymmetric:
    """Lower-triangle storage."""

    def test_from_matrix_round_trips_dense(self):
        """Materializing gives back the same symmetric matrix."""
        dense = np.array([[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.0, -1.0, 2.0]])
        q = SparseSymmetric.from_matrix(dense)
        assert np.array_equal(q.to_dense(), dense)
        assert np.all(q.rows >= q.cols)

    def test_materialized_matrix_is_exactly_symmetric(self):
        """to_dense mirrors the stored triangle exactly."""
        q = random_spd(30, 0.1, 3)
        dense = q.to_dense()
        assert np.array_equal(dense, dense.T)


class TestSparseCholeskySolver:
    """Factorization, solves, variances and sampling."""

    @settings(max_examples=20, deadline=None)
    @seed(20251122)
    @given(n=st.integers(min_value=2, max_value=120), rng_seed=st.integers(min_value=0, max_value=10_000))
    def test_reconstruction_error(self, n, rng_seed):
        """P^T L L^T P reproduces Q within 1e-10 relative Frobenius."""
        q = random_spd(n, 0.05, rng_seed)
        factor = SparseCholeskySolver().cholesky(q)
        dense = q.to_dense()
        error = np.linalg.norm(factor.reconstruct() - dense) / np.linalg.norm(dense)
        assert error <= 1e-10

    @settings(max_examples=15, deadline=None)
    @seed(7)
    @given(n=st.integers(min_value=2, max_value=150), rng_seed=st.integers(min_value=0, max_value=10_000))
    def test_marginal_variances_match_dense_inverse(self, n, rng_seed):
        """diag(Q^-1) agrees with numpy to 1e-8."""
        q = random_spd(n, 0.05, rng_seed)
        solver = SparseCholeskySolver()
        variances = solver.marginal_variances(solver.cholesky(q))
        assert np.allclose(variances, np.diag(np.linalg.inv(q.to_dense())), rtol=1e-8, atol=1e-12)

    def test_selected_inversion_path(self):
        """Forcing the sparse path gives the same variances as the dense path."""
        q = random_spd(80, 0.04, 11)
        sparse_solver = SparseCholeskySolver(dense_threshold=10)
        variances = sparse_solver.marginal_variances(sparse_solver.cholesky(q))
        assert np.allclose(variances, np.diag(np.linalg.inv(q.to_dense())), rtol=1e-8)

    def test_log_det_and_solve(self):
        """log_det and solves (vector and matrix right-hand sides) match dense algebra."""
        q = random_spd(40, 0.1, 5)
        solver = SparseCholeskySolver()
        factor = solver.cholesky(q)
        dense = q.to_dense()
        assert factor.log_det == pytest.approx(np.linalg.slogdet(dense)[1], abs=1e-9)
        rhs = np.arange(40, dtype=float)
        assert np.allclose(solver.solve(factor, rhs), np.linalg.solve(dense, rhs))
        block = np.eye(40)[:, :3]
        assert np.allclose(solver.solve(factor, block), np.linalg.solve(dense, block))

    def test_rhs_with_wrong_rows_is_rejected(self):
        """A right-hand side of the wrong length is a validation error."""
        solver = SparseCholeskySolver()
        factor = solver.cholesky(SparseSymmetric.identity(3))
        with pytest.raises(ModelValidationError):
            solver.solve(factor, np.ones(4))

    def test_semidefinite_matrix_gets_jitter(self):
        """The rank-deficient RW1 structure factorizes with a positive jitter."""
        solver = SparseCholeskySolver()
        factor = solver.cholesky(build_rw1_precision(10, 1.0))
        assert factor.jitter > 0

    def test_indefinite_matrix_fails(self):
        """A clearly indefinite matrix raises after the last jitter."""
        q = SparseSymmetric.from_matrix(np.diag([1.0, -5.0, 2.0]))
        with pytest.raises(FactorizationError):
            SparseCholeskySolver(max_tries=2).cholesky(q)

    def test_sampling_is_seeded(self):
        """Equal seeds give equal draws with the right covariance."""
        solver = SparseCholeskySolver()
        q = SparseSymmetric.from_matrix(np.array([[2.0, -0.8], [-0.8, 1.5]]))
        factor = solver.cholesky(q)
        first = solver.sample(factor, np.zeros(2), 42)
        assert np.array_equal(first, solver.sample(factor, np.zeros(2), 42))
        draws = np.array([solver.sample(factor, np.zeros(2), s) for s in range(4000)])
        assert np.allclose(np.cov(draws.T), np.linalg.inv(q.to_dense()), atol=0.06)
