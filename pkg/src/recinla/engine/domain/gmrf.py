#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 15:48:30$"

"""
Precision constructors for the latent blocks.

All constructors return SparseSymmetric values; nothing here factorizes
except the one-off lattice calibration solve.
"""

from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from recinla.engine.domain.const.model import LatentKind
from recinla.engine.domain.const.numeric import INTRINSIC_JITTER_FACTOR, MAX_KRONECKER_DIM
from recinla.engine.domain.model.errors import DimensionOverflowError, ModelValidationError
from recinla.engine.domain.model.latent import LatentBlockSpec
from recinla.engine.domain.model.sparse import SparseSymmetric


def build_iid_precision(n: int, tau: float) -> SparseSymmetric:
    if n < 1:
        raise ModelValidationError(f"iid block needs n >= 1, got {n}")
    if not tau > 0:
        raise ModelValidationError(f"tau must be positive, got {tau}")
    return SparseSymmetric.identity(n, tau)


def build_ar1_precision(n: int, rho: float, tau: float) -> SparseSymmetric:
    """Stationary AR1 with lag-1 correlation rho and marginal precision tau."""
    if n < 1:
        raise ModelValidationError(f"ar1 block needs n >= 1, got {n}")
    if not abs(rho) < 1:
        raise ModelValidationError(f"|rho| must be < 1, got {rho}")
    if not tau > 0:
        raise ModelValidationError(f"tau must be positive, got {tau}")
    if n == 1:
        return SparseSymmetric.identity(1, tau)
    scale = tau / (1.0 - rho * rho)
    diag = np.full(n, 1.0 + rho * rho)
    diag[0] = diag[-1] = 1.0
    idx = np.arange(n)
    rows = np.concatenate([idx, idx[1:]])
    cols = np.concatenate([idx, idx[:-1]])
    values = scale * np.concatenate([diag, np.full(n - 1, -rho)])
    return SparseSymmetric(n, rows, cols, values)


def build_rw1_precision(n: int, tau: float) -> SparseSymmetric:
    """tau times the first-difference structure matrix (rank n - 1)."""
    if n < 2:
        raise ModelValidationError(f"rw1 block needs n >= 2, got {n}")
    if not tau > 0:
        raise ModelValidationError(f"tau must be positive, got {tau}")
    diag = np.full(n, 2.0)
    diag[0] = diag[-1] = 1.0
    idx = np.arange(n)
    rows = np.concatenate([idx, idx[1:]])
    cols = np.concatenate([idx, idx[:-1]])
    values = tau * np.concatenate([diag, -np.ones(n - 1)])
    return SparseSymmetric(n, rows, cols, values)


def _path_laplacian(n: int) -> sp.csr_matrix:
    ones = np.ones(n - 1)
    degree = np.full(n, 2.0)
    degree[0] = degree[-1] = 1.0
    return sp.diags([-ones, degree, -ones], [-1, 0, 1], format="csr")


def _lattice_operator(nrow: int, ncol: int, kappa2: float) -> sp.csc_matrix:
    """kappa^2 I + G, G the 4-neighbour graph Laplacian, node = r * ncol + c."""
    lap = sp.kron(sp.identity(nrow), _path_laplacian(ncol)) + sp.kron(_path_laplacian(nrow), sp.identity(ncol))
    return sp.csc_matrix(kappa2 * sp.identity(nrow * ncol) + lap)


@lru_cache(maxsize=256)
def lattice_calibration(nrow: int, ncol: int, range_: float) -> float:
    """Centre-node variance of the unscaled (kappa^2 - Laplacian)^2 field."""
    kappa2 = 8.0 / (range_ * range_)
    op = _lattice_operator(nrow, ncol, kappa2)
    centre = (nrow // 2) * ncol + ncol // 2
    unit = np.zeros(nrow * ncol)
    unit[centre] = 1.0
    w = spsolve(op, unit)
    return float(w @ w)


def build_lattice_matern_precision(nrow: int, ncol: int, range: float, tau: float) -> SparseSymmetric:
    """
    Matern-like lattice field from the (kappa^2 - Laplacian)^2 stencil.

    kappa = sqrt(8) / range. The precision is multiplied by the centre-node
    variance, giving marginal precision tau at the lattice centre.
    """
    if nrow < 2 or ncol < 2:
        raise ModelValidationError(f"lattice needs nrow, ncol >= 2, got {nrow}x{ncol}")
    if not range > 0:
        raise ModelValidationError(f"range must be positive, got {range}")
    if not tau > 0:
        raise ModelValidationError(f"tau must be positive, got {tau}")
    op = _lattice_operator(nrow, ncol, 8.0 / (range * range))
    calibration = lattice_calibration(nrow, ncol, float(range))
    return SparseSymmetric.from_matrix((tau * calibration) * (op @ op))


def kronecker(a: SparseSymmetric, b: SparseSymmetric, max_dim: int = MAX_KRONECKER_DIM) -> SparseSymmetric:
    dim = a.dim * b.dim
    if dim > max_dim:
        raise DimensionOverflowError(f"kronecker dimension {dim} exceeds the configured maximum {max_dim}")
    return SparseSymmetric.from_matrix(sp.kron(a.to_csc(), b.to_csc(), format="csc"))


def build_kronecker_ar1_lattice_precision(
    n_time: int,
    nrow: int,
    ncol: int,
    rho: float,
    range: float,
    tau: float,
    max_dim: int = MAX_KRONECKER_DIM,
) -> SparseSymmetric:
    """Q_t(rho) kron Q_s(range), time-major, marginal precision tau."""
    temporal = build_ar1_precision(n_time, rho, 1.0)
    spatial = build_lattice_matern_precision(nrow, ncol, range, 1.0)
    return kronecker(temporal, spatial, max_dim).scaled(tau)


def expert_covariance(taus: Sequence[float], rhos: np.ndarray) -> np.ndarray:
    """
    Sigma_ii = 1 / tau_i, Sigma_ij = rho_ij / sqrt(tau_i tau_j).

    rhos is either a full symmetric correlation matrix or the upper
    triangle listed row by row.
    """
    taus = np.asarray(taus, dtype=np.float64)
    m = taus.size
    if np.any(taus <= 0):
        raise ModelValidationError("expert precisions must be positive")
    rhos = np.asarray(rhos, dtype=np.float64)
    if rhos.ndim == 2:
        corr = rhos.copy()
    else:
        corr = np.eye(m)
        iu = np.triu_indices(m, k=1)
        if rhos.size != iu[0].size:
            raise ModelValidationError(f"expected {iu[0].size} correlations, got {rhos.size}")
        corr[iu] = rhos
        corr[(iu[1], iu[0])] = rhos
    sd = 1.0 / np.sqrt(taus)
    return corr * np.outer(sd, sd)


def dense_precision(covariance: np.ndarray) -> np.ndarray:
    try:
        np.linalg.cholesky(covariance)
    except np.linalg.LinAlgError as e:
        raise ModelValidationError("expert covariance is not positive definite") from e
    precision = np.linalg.inv(covariance)
    return 0.5 * (precision + precision.T)


def build_block_precision(
    block: LatentBlockSpec,
    natural: Mapping[str, float],
    max_dim: int = MAX_KRONECKER_DIM,
) -> SparseSymmetric:
    """
    Precision of one latent block for natural-scale role values.

    Intrinsic blocks receive a diagonal jitter of 1e-5 times their
    maximum diagonal so the prior is proper.
    """
    kind = block.kind
    if kind == LatentKind.IID:
        q = build_iid_precision(block.n, natural["tau"])
    elif kind == LatentKind.RW1:
        q = build_rw1_precision(block.n, natural["tau"])
        q = q.plus(sp.identity(block.n) * (INTRINSIC_JITTER_FACTOR * q.max_diagonal()))
    elif kind == LatentKind.AR1:
        q = build_ar1_precision(block.n, natural["rho"], natural["tau"])
    elif kind == LatentKind.LATTICE_MATERN:
        q = build_lattice_matern_precision(block.nrow, block.ncol, natural["range"], natural["tau"])
    elif kind == LatentKind.KRONECKER_AR1_LATTICE:
        q = build_kronecker_ar1_lattice_precision(
            block.n_time, block.nrow, block.ncol, natural["rho"], natural["range"], natural["tau"], max_dim
        )
    elif kind == LatentKind.FIXED_EFFECT:
        idx = np.arange(block.n)
        q = SparseSymmetric(block.n, idx, idx, block.prior_precision)
    elif kind == LatentKind.MVN_DENSE:
        taus = [natural[f"tau_{i + 1}"] for i in range(block.n_sources)]
        rhos = [
            natural[f"rho_{i + 1}_{j + 1}"]
            for i in range(block.n_sources)
            for j in range(i + 1, block.n_sources)
        ]
        dense = dense_precision(expert_covariance(taus, np.asarray(rhos)))
        q = SparseSymmetric.from_matrix(sp.kron(sp.identity(block.n_replicates), sp.csr_matrix(dense)))
    else:
        raise ModelValidationError(f"unsupported latent kind {kind}")
    return q if block.precision_scale == 1.0 else q.scaled(block.precision_scale)
