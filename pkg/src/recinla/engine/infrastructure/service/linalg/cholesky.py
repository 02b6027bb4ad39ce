#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 25, 2025 10:26:47$"

import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import splu, spsolve_triangular

from recinla.engine.application.interface.solver import BaseCholeskySolver
from recinla.engine.domain.model.errors import FactorizationError, ModelValidationError
from recinla.engine.domain.model.sparse import CholeskyFactor, SparseSymmetric

logger = logging.getLogger(__name__)


class _NotPositiveDefinite(Exception):
    pass


class SparseCholeskySolver(BaseCholeskySolver):
    """
    Sparse Cholesky built on SuperLU in symmetric mode.

    With diagonal pivoting only and a symmetric minimum-degree ordering
    SuperLU returns Q[p][:, p] = L D L^T, so L sqrt(D) is the Cholesky
    factor. When SuperLU picks off-diagonal pivots the dense LAPACK
    factorization is used instead.
    """

    def __init__(
        self,
        dense_threshold: int = 5000,
        jitter_factor: float = 1e-5,
        jitter_growth: float = 10.0,
        max_tries: int = 6,
        pivot_tolerance: float = 1e-10,
    ):
        """
        Args:
            dense_threshold: Largest dimension for the dense-inverse variance path
            jitter_factor: First jitter, relative to the maximum diagonal
            jitter_growth: Multiplier between jitter attempts
            max_tries: Number of jittered attempts before giving up
            pivot_tolerance: Pivots below this fraction of the maximum diagonal count as zero
        """
        self.dense_threshold = dense_threshold
        self.jitter_factor = jitter_factor
        self.jitter_growth = jitter_growth
        self.max_tries = max_tries
        self.pivot_tolerance = pivot_tolerance

    def cholesky(self, q: SparseSymmetric) -> CholeskyFactor:
        """
        Factorize q, adding diagonal jitter when it is only semidefinite.

        Raises:
            FactorizationError: If q is not factorizable after max_tries jitters
        """
        matrix = q.to_csc()
        scale = max(q.max_diagonal(), np.finfo(float).tiny)
        jitter = 0.0
        for attempt in range(self.max_tries + 1):
            current = matrix if jitter == 0.0 else sp.csc_matrix(matrix + jitter * sp.identity(q.dim))
            try:
                factor = self._factor(current, jitter, scale)
                if jitter > 0:
                    logger.debug(f"Factorized dim={q.dim} with jitter {jitter:.3e} after {attempt} retries")
                return factor
            except _NotPositiveDefinite as e:
                logger.debug(f"Factorization attempt {attempt} failed (jitter={jitter:.3e}): {e}")
                jitter = self.jitter_factor * scale if jitter == 0.0 else jitter * self.jitter_growth
        raise FactorizationError(f"matrix of dim {q.dim} is not positive definite after jitter {jitter:.3e}")

    def _factor(self, matrix: sp.csc_matrix, jitter: float, scale: float) -> CholeskyFactor:
        n = matrix.shape[0]
        try:
            lu = splu(
                matrix,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as e:
            raise _NotPositiveDefinite(str(e)) from e
        if not np.array_equal(lu.perm_r, lu.perm_c):
            logger.debug(f"SuperLU used off-diagonal pivots for dim={n}, switching to dense factorization")
            return self._dense_factor(matrix, jitter, scale)
        pivots = lu.U.diagonal()
        if not np.all(np.isfinite(pivots)) or np.any(pivots <= self.pivot_tolerance * scale):
            raise _NotPositiveDefinite("non-positive pivot")
        lower = sp.csc_matrix(lu.L @ sp.diags(np.sqrt(pivots)))
        return CholeskyFactor(
            lower_factor=lower,
            permutation=np.argsort(lu.perm_c),
            log_det=float(np.sum(np.log(pivots))),
            jitter=jitter,
            dim=n,
            backend="superlu",
            handle=lu,
        )

    def _dense_factor(self, matrix: sp.csc_matrix, jitter: float, scale: float) -> CholeskyFactor:
        try:
            lower = scipy.linalg.cholesky(matrix.toarray(), lower=True)
        except np.linalg.LinAlgError as e:
            raise _NotPositiveDefinite(str(e)) from e
        diag = np.diag(lower)
        if np.any(diag * diag <= self.pivot_tolerance * scale):
            raise _NotPositiveDefinite("non-positive pivot")
        return CholeskyFactor(
            lower_factor=sp.csc_matrix(lower),
            permutation=np.arange(matrix.shape[0]),
            log_det=float(2.0 * np.sum(np.log(diag))),
            jitter=jitter,
            dim=matrix.shape[0],
            backend="dense",
            handle=lower,
        )

    def solve(self, factor: CholeskyFactor, rhs: np.ndarray) -> np.ndarray:
        """Solve (Q + jitter I) x = rhs; rhs may be a vector or a matrix of columns."""
        rhs = np.ascontiguousarray(rhs, dtype=np.float64)
        if rhs.shape[0] != factor.dim:
            raise ModelValidationError(f"rhs has {rhs.shape[0]} rows, factor has dim {factor.dim}")
        if factor.backend == "superlu" and factor.handle is not None:
            return factor.handle.solve(rhs)
        if factor.backend == "dense" and factor.handle is not None:
            return scipy.linalg.cho_solve((factor.handle, True), rhs)
        return self._triangular_solve(factor, rhs)

    def _triangular_solve(self, factor: CholeskyFactor, rhs: np.ndarray) -> np.ndarray:
        order = factor.permutation
        lower = sp.csr_matrix(factor.lower_factor)
        w = spsolve_triangular(lower, rhs[order], lower=True)
        y = spsolve_triangular(sp.csr_matrix(lower.T), w, lower=False)
        out = np.empty_like(y)
        out[order] = y
        return out

    def marginal_variances(self, factor: CholeskyFactor) -> np.ndarray:
        """diag(Q^-1); dense inverse up to dense_threshold, selected inversion beyond."""
        if factor.dim <= self.dense_threshold:
            return self._dense_variances(factor)
        try:
            return self._selected_inversion(factor)
        except KeyError:
            logger.warning(f"Factor pattern of dim={factor.dim} is not closed, using column solves")
            return self._dense_variances(factor)

    def _dense_variances(self, factor: CholeskyFactor, chunk: int = 512) -> np.ndarray:
        n = factor.dim
        out = np.empty(n)
        for start in range(0, n, chunk):
            stop = min(start + chunk, n)
            block = np.zeros((n, stop - start))
            block[np.arange(start, stop), np.arange(stop - start)] = 1.0
            solved = self.solve(factor, block)
            out[start:stop] = solved[np.arange(start, stop), np.arange(stop - start)]
        return out

    def _selected_inversion(self, factor: CholeskyFactor) -> np.ndarray:
        """
        Takahashi recursions over the pattern of L.

        Sigma = (L L^T)^-1 is filled from the last column backwards, only at
        the nonzero positions of L. Column j needs Sigma on the rows below j
        that are nonzero in L[:, j]; those entries were computed in later
        columns because the pattern of a Cholesky factor is closed. A
        missing entry raises KeyError and the caller switches to solves.
        """
        lower = sp.csc_matrix(factor.lower_factor)
        lower.sort_indices()
        n = factor.dim
        # lower triangle only, keyed (row, col) with row >= col
        sigma: dict[tuple[int, int], float] = {}
        diag = np.empty(n)
        for j in range(n - 1, -1, -1):
            start, stop = lower.indptr[j], lower.indptr[j + 1]
            rows = lower.indices[start:stop]
            vals = lower.data[start:stop]
            ljj = vals[rows == j][0]
            below = rows > j
            r, l = rows[below], vals[below]
            if r.size:
                block = np.empty((r.size, r.size))
                for a, ra in enumerate(r):
                    for b in range(a, r.size):
                        rb = r[b]
                        value = sigma[(ra, rb)] if ra >= rb else sigma[(rb, ra)]
                        block[a, b] = block[b, a] = value
                # Sigma[r, j] = -Sigma[r, r] L[r, j] / L[j, j]
                col = -(block @ l) / ljj
                for ra, value in zip(r, col):
                    sigma[(int(ra), j)] = float(value)
                # Sigma[j, j] = 1 / L[j, j]^2 - L[r, j] . Sigma[r, j] / L[j, j]
                sjj = 1.0 / (ljj * ljj) - float(l @ col) / ljj
            else:
                sjj = 1.0 / (ljj * ljj)
            sigma[(j, j)] = sjj
            diag[j] = sjj
        # diag is in factor order; scatter back to the original node order
        out = np.empty(n)
        out[factor.permutation] = diag
        return out

    def sample(self, factor: CholeskyFactor, mean: np.ndarray, seed: int) -> np.ndarray:
        """mean + P^T L^-T z with z standard normal from a seeded generator."""
        mean = np.asarray(mean, dtype=np.float64)
        rng = np.random.default_rng(seed)
        z = rng.standard_normal(factor.dim)
        upper = sp.csr_matrix(factor.lower_factor.T)
        w = spsolve_triangular(upper, z, lower=False)
        x = np.empty(factor.dim)
        x[factor.permutation] = w
        return mean + x
