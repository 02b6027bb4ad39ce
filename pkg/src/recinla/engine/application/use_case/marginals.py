#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 25, 2025 18:02:51$"

import logging
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import null_space
from scipy.special import logsumexp
from scipy.stats import norm

from recinla.engine.domain.const.model import ExplorationStrategy, Transform
from recinla.engine.domain.model.approx import HyperGrid, HyperMarginal, LatentMarginals
from recinla.engine.domain.model.hyper import internal_jacobian, to_natural

logger = logging.getLogger(__name__)

# points per complement dimension of the hyperplane quadrature
_PLANE_POINTS = {1: 61, 2: 25, 3: 13, 4: 9}
_MIN_Z_VARIANCE = 1e-4


def mixture_marginals(means: np.ndarray, variances: np.ndarray, weights: np.ndarray, n_grid: int) -> LatentMarginals:
    """
    Per-node Gaussian mixture sum_k w_k N(mean_k, var_k).

    Args:
        means: K x n modes of the per-point approximations
        variances: K x n marginal variances
        weights: K normalized mixture weights
        n_grid: Density grid size per node (mean +- 6 sd)
    """
    means = np.atleast_2d(means)
    variances = np.maximum(np.atleast_2d(variances), np.finfo(float).tiny)
    weights = np.asarray(weights, dtype=np.float64)
    mean = weights @ means
    second = weights @ (variances + means * means)
    var = np.maximum(second - mean * mean, np.finfo(float).tiny)
    if means.shape[0] == 1:
        var = variances[0]
    sd = np.sqrt(var)
    offsets = np.linspace(-6.0, 6.0, n_grid)
    grid = mean[:, None] + sd[:, None] * offsets[None, :]
    density = np.zeros_like(grid)
    for w, m, v in zip(weights, means, variances):
        if w == 0.0:
            continue
        density += w * norm.pdf(grid, loc=m[:, None], scale=np.sqrt(v)[:, None])
    return LatentMarginals(mean=mean, sd=sd, grid=grid, density=density)


def log_evidence(grid: HyperGrid) -> float:
    """log sum_k exp(log_density_k) Delta_k."""
    finite = np.isfinite(grid.log_density)
    if not np.any(finite):
        return float("-inf")
    return float(logsumexp(grid.log_density[finite], b=grid.weights[finite]))


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(np.trapezoid(y, x)) if hasattr(np, "trapezoid") else float(np.trapz(y, x))


def _plane_marginal(
    log_f: Callable[[np.ndarray], np.ndarray],
    direction: np.ndarray,
    offsets: np.ndarray,
    extent: float,
) -> np.ndarray:
    """
    p(t) proportional to the integral of f over {z : direction . z = t}.

    The plane is sampled by a regular grid of half-width extent in an
    orthonormal basis of the complement of direction.
    """
    d = direction.size
    length = float(np.linalg.norm(direction))
    unit = direction / length
    if d == 1:
        logs = log_f((offsets / direction[0])[:, None])[:, None]
    else:
        basis = null_space(unit[None, :])
        m = _PLANE_POINTS.get(d - 1, 7)
        axis = np.linspace(-extent, extent, m)
        mesh = np.stack(np.meshgrid(*([axis] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
        plane = mesh @ basis.T
        logs = np.empty((offsets.size, plane.shape[0]))
        for i, t in enumerate(offsets):
            logs[i] = log_f(plane + unit * (t / length))
    finite = np.isfinite(logs)
    top = logs[finite].max() if np.any(finite) else 0.0
    return np.where(finite, np.exp(logs - top), 0.0).sum(axis=1) / length


def _finish(
    name: str,
    transform: Transform,
    t_grid: np.ndarray,
    density: np.ndarray,
    degenerate: bool = False,
) -> HyperMarginal:
    density = np.maximum(density, 0.0)
    total = _trapezoid(density, t_grid)
    density = density / total
    mean = _trapezoid(t_grid * density, t_grid)
    sd = np.sqrt(max(_trapezoid((t_grid - mean) ** 2 * density, t_grid), 0.0))
    natural_grid = to_natural(transform, t_grid)
    natural_density = density * internal_jacobian(transform, natural_grid)
    natural_density = natural_density / _trapezoid(natural_density, natural_grid)
    return HyperMarginal(
        name=name,
        internal_grid=t_grid,
        internal_density=density,
        natural_grid=natural_grid,
        natural_density=natural_density,
        internal_mean=float(mean),
        internal_sd=float(sd),
        natural_mean=_trapezoid(natural_grid * natural_density, natural_grid),
        natural_mode=float(natural_grid[int(np.argmax(natural_density))]),
        degenerate=degenerate,
    )


def gaussian_marginals(grid: HyperGrid, n_points: int) -> tuple:
    """Marginals of N(theta_mode, S S^T), used for degenerate grids."""
    cov = grid.scaling @ grid.scaling.T
    out = []
    for j, (name, transform) in enumerate(zip(grid.names, grid.transforms)):
        sd = float(np.sqrt(max(cov[j, j], np.finfo(float).tiny)))
        t_grid = grid.theta_mode[j] + sd * np.linspace(-6.0, 6.0, n_points)
        density = norm.pdf(t_grid, loc=grid.theta_mode[j], scale=sd)
        out.append(_finish(name, transform, t_grid, density, degenerate=True))
    return tuple(out)


def _lattice_log_density(grid: HyperGrid) -> tuple[Callable, np.ndarray, np.ndarray]:
    """Multilinear interpolant of the log density over the z lattice."""
    index = grid.lattice_index
    lo, hi = index.min(axis=0), index.max(axis=0)
    axes = [np.arange(a, b + 1) * grid.step_size for a, b in zip(lo, hi)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    origin = np.all(index == 0, axis=1)
    top = grid.log_density[origin][0] if np.any(origin) else np.max(grid.log_density)
    table = top - 0.5 * np.sum(mesh * mesh, axis=-1)
    for row, value in zip(index, grid.log_density):
        table[tuple(row - lo)] = value
    interp = RegularGridInterpolator(axes, table, method="linear", bounds_error=False, fill_value=-np.inf)
    return interp, lo * grid.step_size, hi * grid.step_size


def _quadratic_fit(z: np.ndarray, y: np.ndarray) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """
    Least-squares quadratic c + b.z - z.A.z / 2 through (z, y).

    Uses every cross term when there are enough points, otherwise only the
    diagonal ones.

    Returns:
        (centre, covariance) of the matching Gaussian, or None when A is
        not positive definite or the points cannot determine it
    """
    n, d = z.shape
    rows, cols = np.triu_indices(d)
    full = n >= 1 + d + rows.size
    if not full:
        rows = cols = np.arange(d)
        if n < 1 + 2 * d:
            return None
    features = np.hstack([np.ones((n, 1)), z, z[:, rows] * z[:, cols]])
    coef, _, rank, _ = np.linalg.lstsq(features, y, rcond=None)
    if rank < features.shape[1]:
        return None
    b = coef[1:d + 1]
    hessian = np.zeros((d, d))
    for (i, j), q in zip(zip(rows, cols), coef[d + 1:]):
        if i == j:
            hessian[i, i] = 2.0 * q
        else:
            hessian[i, j] = hessian[j, i] = q
    precision = -hessian
    try:
        np.linalg.cholesky(precision)
    except np.linalg.LinAlgError:
        return None
    cov = np.linalg.inv(precision)
    return np.linalg.solve(precision, b), 0.5 * (cov + cov.T)


def _moment_fit(grid: HyperGrid) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of z under the normalized support weights."""
    w = grid.normalized_weights()
    mean = w @ grid.z_points
    centred = grid.z_points - mean
    cov = (w[:, None] * centred).T @ centred
    # a single dominant point leaves no spread to measure
    values, vectors = np.linalg.eigh(0.5 * (cov + cov.T))
    values = np.maximum(values, _MIN_Z_VARIANCE)
    return mean, (vectors * values) @ vectors.T


def _ccd_marginals(grid: HyperGrid, n_points: int) -> tuple:
    finite = np.isfinite(grid.log_density)
    fitted = _quadratic_fit(grid.z_points[finite], grid.log_density[finite])
    degenerate = fitted is None
    if degenerate:
        logger.warning("Accumulated ccd densities are not concave, using weighted moments of the design")
        centre, cov = _moment_fit(grid)
    else:
        centre, cov = fitted
    # theta = theta_mode + S z, so every marginal is Gaussian on the internal scale
    means = grid.theta_mode + grid.scaling @ centre
    variances = np.einsum("ij,jk,ik->i", grid.scaling, cov, grid.scaling)
    out = []
    for j, (name, transform) in enumerate(zip(grid.names, grid.transforms)):
        sd = float(np.sqrt(max(variances[j], np.finfo(float).tiny)))
        t_grid = means[j] + sd * np.linspace(-6.0, 6.0, n_points)
        density = norm.pdf(t_grid, loc=means[j], scale=sd)
        out.append(_finish(name, transform, t_grid, density, degenerate=degenerate))
    return tuple(out)


def hyper_marginals(grid: HyperGrid, n_points: int = 81) -> tuple:
    """
    Per-hyperparameter densities on the internal and natural scales.

    Axis grids integrate the multilinear interpolant of the retained log
    densities over the hyperplanes theta_j = t in the standardized space.
    ccd designs fit a Gaussian to all their log densities, centred where
    the fit peaks rather than at the design centre, so recursive updates
    that move the mass are followed. Axis grids with too few points fall
    back to the Gaussian from the mode and curvature.
    """
    d = grid.dim
    if d == 0:
        return ()
    if grid.strategy == ExplorationStrategy.AXIS_GRID and grid.lattice_index is not None:
        index = grid.lattice_index
        if any(np.unique(index[:, i]).size < 3 for i in range(d)):
            logger.warning("Axis grid has fewer than 3 points along some axis, using Gaussian marginals")
            return gaussian_marginals(grid, n_points)
        log_f, z_lo, z_hi = _lattice_log_density(grid)
        extent = float(np.sqrt(np.sum(np.maximum(z_lo ** 2, z_hi ** 2))))
        out = []
        for j in range(d):
            s = grid.scaling[j]
            t_lo = float(np.sum(np.minimum(s * z_lo, s * z_hi)))
            t_hi = float(np.sum(np.maximum(s * z_lo, s * z_hi)))
            offsets = np.linspace(t_lo, t_hi, n_points)
            density = _plane_marginal(log_f, s, offsets, extent)
            out.append(_finish(grid.names[j], grid.transforms[j], grid.theta_mode[j] + offsets, density))
        return tuple(out)
    return _ccd_marginals(grid, n_points)
