#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 28, 2025 16:40:12$"

"""
Reference computations by dense algebra and brute-force quadrature.

Both oracles evaluate the model from its definition and share nothing
with the engine beyond the block precision constructors.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.stats import multivariate_normal

from recinla.engine.domain.gmrf import build_block_precision
from recinla.engine.domain.likelihood import loglik, observation_precision
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.hyper import to_natural

logger = logging.getLogger(__name__)

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class ConjugatePosterior:
    """
    Exact conditional posterior at fixed theta.

    precision is the unconstrained posterior precision; covariance is
    conditioned on the model constraints.
    """
    mean: np.ndarray
    precision: np.ndarray
    covariance: np.ndarray
    log_evidence: float


@dataclass(frozen=True)
class QuadratureResult:
    x_grid: np.ndarray
    x_density: np.ndarray
    theta_grid: np.ndarray
    theta_density: np.ndarray
    log_evidence: float
    log_conditional_evidence: np.ndarray
    x_mode: float
    x_mean: float
    x_sd: float
    theta_mode: Optional[float] = None


def _trapezoid(y: np.ndarray, x: np.ndarray, axis: int = -1):
    fn = np.trapezoid if hasattr(np, "trapezoid") else np.trapz
    return fn(y, x, axis=axis)


def _dense_prior(model: ModelAssembly, theta: Sequence[float]) -> tuple[np.ndarray, np.ndarray, dict]:
    layout = model.hyper_layout
    values = layout.theta_values(np.atleast_1d(np.asarray(theta, dtype=np.float64)))
    mats, means = [], []
    for block in model.latent_blocks:
        natural = dict(block.fixed_params)
        for role, name in block.hyper_bindings.items():
            natural[role] = float(to_natural(layout.get(name).transform, values[name]))
        mats.append(build_block_precision(block, natural).to_dense())
        means.append(np.zeros(block.size) if block.prior_mean is None else np.asarray(block.prior_mean, dtype=np.float64))
    return sla.block_diag(*mats), np.concatenate(means), values


def _condition(mean: np.ndarray, cov: np.ndarray, model: ModelAssembly) -> tuple[np.ndarray, np.ndarray]:
    constraints = model.constraints()
    if constraints is None:
        return mean, cov
    c = constraints.matrix
    gain = cov @ c.T @ np.linalg.inv(c @ cov @ c.T)
    mean = mean - gain @ (c @ mean - constraints.values)
    cov = cov - gain @ c @ cov
    return mean, 0.5 * (cov + cov.T)


def oracle_conjugate_gaussian(model: ModelAssembly, theta: Sequence[float]) -> ConjugatePosterior:
    """
    Closed-form posterior of x and log p(y | theta) for an all-gaussian model.

    Raises:
        ModelValidationError: If any observation block is not gaussian
    """
    if not model.is_gaussian:
        raise ModelValidationError("conjugate oracle needs gaussian observation blocks only")
    q, mu0, values = _dense_prior(model, theta)
    prior_cov = np.linalg.inv(q)
    prior_mean, prior_cov_c = _condition(mu0, prior_cov, model)
    if model.n_observations == 0:
        return ConjugatePosterior(mean=prior_mean, precision=q, covariance=prior_cov_c, log_evidence=0.0)

    a = model.design(values).toarray()
    y = np.concatenate([b.values for b in model.observation_blocks])
    d = np.concatenate([observation_precision(b, values) for b in model.observation_blocks])
    marginal_cov = a @ prior_cov_c @ a.T + np.diag(1.0 / d)
    log_evidence = float(multivariate_normal(mean=a @ prior_mean, cov=marginal_cov).logpdf(y))

    precision = q + a.T @ (d[:, None] * a)
    cov = np.linalg.inv(precision)
    mean = cov @ (q @ mu0 + a.T @ (d * y))
    mean, cov = _condition(mean, cov, model)
    return ConjugatePosterior(mean=mean, precision=precision, covariance=cov, log_evidence=log_evidence)


def _refine_peak(grid: np.ndarray, log_values: np.ndarray) -> float:
    """Vertex of the parabola through the maximum and its two neighbours."""
    k = int(np.argmax(log_values))
    if k == 0 or k == grid.size - 1:
        return float(grid[k])
    x0, x1, x2 = grid[k - 1:k + 2]
    y0, y1, y2 = log_values[k - 1:k + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    return float(-b / (2.0 * a)) if a < 0 else float(grid[k])


def oracle_quadrature_1d(
    model: ModelAssembly,
    x_grid: Sequence[float],
    theta_grid: Sequence[float] = None,
) -> QuadratureResult:
    """
    Trapezoid-rule quadrature of the joint density over (x, theta).

    Args:
        model: Model with one latent node and at most one free hyperparameter
        x_grid: Increasing grid for the latent node
        theta_grid: Increasing internal-scale grid, required when a hyperparameter is free

    Raises:
        ModelValidationError: If the problem has more than two quadrature dimensions
    """
    if model.latent_dim != 1:
        raise ModelValidationError(f"quadrature oracle needs one latent node, model has {model.latent_dim}")
    dim = model.hyper_layout.dim
    if dim > 1:
        raise ModelValidationError(f"quadrature oracle handles at most one hyperparameter, model has {dim}")
    x = np.asarray(x_grid, dtype=np.float64)
    if dim == 1:
        if theta_grid is None:
            raise ModelValidationError("theta_grid is required when the model has a free hyperparameter")
        thetas = np.asarray(theta_grid, dtype=np.float64)
    else:
        thetas = np.zeros(1)

    cache: dict[tuple, np.ndarray] = {}

    def data_loglik(values: dict) -> np.ndarray:
        key = tuple(
            values[name] if name else None
            for b in model.observation_blocks
            for name in (b.likelihood.precision_binding, b.scale_binding)
        )
        if key not in cache:
            out = np.zeros(x.size)
            for block in model.observation_blocks:
                design = block.design(values[block.scale_binding] if block.scale_binding else None).toarray()[:, 0]
                out += np.array([loglik(block, design * xi, values) for xi in x])
            cache[key] = out
        return cache[key]

    log_joint = np.empty((thetas.size, x.size))
    log_hyper_prior = np.empty(thetas.size)
    for i, t in enumerate(thetas):
        point = np.atleast_1d(t) if dim == 1 else np.zeros(0)
        q, mu0, values = _dense_prior(model, point)
        q = float(q[0, 0])
        log_prior = 0.5 * np.log(q) - 0.5 * _LOG_2PI - 0.5 * q * (x - mu0[0]) ** 2
        log_hyper_prior[i] = model.hyper_layout.prior_log_density(point)
        log_joint[i] = log_prior + data_loglik(values) + log_hyper_prior[i]

    top = float(np.max(log_joint))
    joint = np.exp(log_joint - top)
    per_theta = _trapezoid(joint, x, axis=1)
    log_conditional = np.log(per_theta) + top - log_hyper_prior

    if dim == 1:
        x_density = _trapezoid(joint, thetas, axis=0)
        theta_density = per_theta / _trapezoid(per_theta, thetas)
        log_evidence = float(np.log(_trapezoid(per_theta, thetas)) + top)
        theta_mode = _refine_peak(thetas, np.log(np.maximum(theta_density, np.finfo(float).tiny)))
    else:
        x_density = joint[0]
        theta_density = np.ones(1)
        log_evidence = float(np.log(per_theta[0]) + top)
        theta_mode = None
    x_density = x_density / _trapezoid(x_density, x)
    x_mean = float(_trapezoid(x * x_density, x))
    x_sd = float(np.sqrt(max(_trapezoid((x - x_mean) ** 2 * x_density, x), 0.0)))
    logger.debug(f"Quadrature oracle: {thetas.size} x {x.size} points, log evidence {log_evidence:.8f}")
    return QuadratureResult(
        x_grid=x,
        x_density=x_density,
        theta_grid=thetas if dim == 1 else np.zeros(0),
        theta_density=theta_density if dim == 1 else np.zeros(0),
        log_evidence=log_evidence,
        log_conditional_evidence=log_conditional,
        x_mode=_refine_peak(x, np.log(np.maximum(x_density, np.finfo(float).tiny))),
        x_mean=x_mean,
        x_sd=x_sd,
        theta_mode=theta_mode,
    )
