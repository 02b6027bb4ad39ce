#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 10:03:51$"

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import scipy.sparse as sp

from recinla.engine.domain.model.errors import ModelValidationError


@dataclass(frozen=True)
class SparseSymmetric:
    """
    Symmetric matrix stored as its lower triangle in triplet form.

    Coordinates are 0-based, row >= col, no duplicate pairs. The full
    matrix is materialized as L + L^T - diag(L) so it is exactly symmetric.
    """
    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ModelValidationError(f"dim must be >= 1, got {self.dim}")
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if not (rows.shape == cols.shape == values.shape):
            raise ModelValidationError("rows, cols and values must have equal length")
        if rows.size and (np.any(rows < cols) or rows.max() >= self.dim or cols.min() < 0):
            raise ModelValidationError("entries must lie in the lower triangle of a dim x dim matrix")
        keys = rows * self.dim + cols
        if np.unique(keys).size != keys.size:
            raise ModelValidationError("duplicate (row, col) entries")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_matrix(cls, matrix) -> "SparseSymmetric":
        """
        Build from a dense array or scipy sparse matrix.

        Only the lower triangle is read; the caller is responsible for
        passing a symmetric matrix.
        """
        if sp.issparse(matrix):
            lower = sp.tril(matrix, format="coo")
        else:
            dense = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
            lower = sp.coo_matrix(np.tril(dense))
        lower = lower.tocsr()
        lower.sum_duplicates()
        lower.eliminate_zeros()
        lower = lower.tocoo()
        return cls(dim=int(matrix.shape[0]), rows=lower.row, cols=lower.col, values=lower.data)

    @classmethod
    def identity(cls, dim: int, scale: float = 1.0) -> "SparseSymmetric":
        idx = np.arange(dim)
        return cls(dim=dim, rows=idx, cols=idx, values=np.full(dim, float(scale)))

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def lower(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.values, (self.rows, self.cols)), shape=(self.dim, self.dim))

    def to_csc(self) -> sp.csc_matrix:
        low = self.lower()
        full = low + low.T - sp.diags(low.diagonal())
        return sp.csc_matrix(full)

    def to_dense(self) -> np.ndarray:
        return self.to_csc().toarray()

    def diagonal(self) -> np.ndarray:
        return self.lower().diagonal()

    def max_diagonal(self) -> float:
        diag = self.diagonal()
        return float(diag.max()) if diag.size else 0.0

    def scaled(self, factor: float) -> "SparseSymmetric":
        return SparseSymmetric(self.dim, self.rows, self.cols, self.values * float(factor))

    def plus(self, other) -> "SparseSymmetric":
        """Sum with another SparseSymmetric or a symmetric scipy matrix."""
        other_csc = other.to_csc() if isinstance(other, SparseSymmetric) else sp.csc_matrix(other)
        if other_csc.shape != (self.dim, self.dim):
            raise ModelValidationError(f"shape mismatch: {other_csc.shape} vs {self.dim}")
        return SparseSymmetric.from_matrix(self.to_csc() + other_csc)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.to_csc() @ np.asarray(x, dtype=np.float64)


@dataclass(frozen=True)
class CholeskyFactor:
    """
    Factor of Q (+ jitter I): Q[order][:, order] = L L^T.

    `permutation` is the node ordering used; `handle` is the backend
    object used for fast solves and is not part of equality.
    """
    lower_factor: sp.csc_matrix
    permutation: np.ndarray
    log_det: float
    jitter: float
    dim: int
    backend: str
    handle: Optional[Any] = field(default=None, repr=False, compare=False)

    def permutation_matrix(self) -> sp.csr_matrix:
        """P with (P x) = x[permutation]."""
        n = self.dim
        return sp.csr_matrix((np.ones(n), (np.arange(n), self.permutation)), shape=(n, n))

    def reconstruct(self) -> np.ndarray:
        """Dense P^T L L^T P, i.e. the factored matrix in the original ordering."""
        p = self.permutation_matrix()
        llt = self.lower_factor @ self.lower_factor.T
        return (p.T @ llt @ p).toarray()
