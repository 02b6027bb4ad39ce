#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 16:55:12$"

from typing import Mapping

import numpy as np
from scipy.special import expit, gammaln

from recinla.engine.domain.const.model import LikelihoodFamily
from recinla.engine.domain.const.numeric import CURVATURE_FLOOR
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.likelihood import ObservationBlock

_LOG_2PI = float(np.log(2.0 * np.pi))


def expert_precision(psi: float, phi) -> np.ndarray:
    """tau_i = psi * phi_i."""
    phi = np.asarray(phi, dtype=np.float64)
    if not psi > 0 or np.any(phi <= 0):
        raise ModelValidationError("psi and phi must be strictly positive")
    return psi * phi


def observation_precision(block: ObservationBlock, theta1: Mapping[str, float]) -> np.ndarray:
    """Per-observation gaussian precision from internal-scale hyper values."""
    binding = block.likelihood.precision_binding
    if binding is None:
        log_tau = block.likelihood.fixed_log_precision
    else:
        if binding not in theta1:
            raise ModelValidationError(f"missing hyperparameter '{binding}' for block '{block.name}'")
        log_tau = theta1[binding]
    tau = float(np.exp(log_tau))
    if block.precision_scales is not None:
        return expert_precision(tau, block.precision_scales)
    return np.full(block.size, tau)


def _check_eta(block: ObservationBlock, eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=np.float64).ravel()
    if eta.size != block.size:
        raise ModelValidationError(f"eta has length {eta.size}, block '{block.name}' has {block.size} values")
    if not np.all(np.isfinite(eta)):
        raise ModelValidationError(f"non-finite linear predictor for block '{block.name}'")
    return eta


def _trials(block: ObservationBlock) -> np.ndarray:
    return np.broadcast_to(block.likelihood.trials, block.values.shape)


def loglik(block: ObservationBlock, eta, theta1: Mapping[str, float]) -> float:
    """Sum of log p(y_i | eta_i, theta1)."""
    eta = _check_eta(block, eta)
    y = block.values
    family = block.likelihood.family
    if family == LikelihoodFamily.GAUSSIAN:
        tau = observation_precision(block, theta1)
        return float(np.sum(0.5 * np.log(tau) - 0.5 * _LOG_2PI - 0.5 * tau * (y - eta) ** 2))
    if family == LikelihoodFamily.POISSON:
        return float(np.sum(y * eta - np.exp(eta) - gammaln(y + 1.0)))
    if family == LikelihoodFamily.BERNOULLI:
        return float(np.sum(y * eta - np.logaddexp(0.0, eta)))
    n = _trials(block)
    log_choose = gammaln(n + 1.0) - gammaln(y + 1.0) - gammaln(n - y + 1.0)
    return float(np.sum(log_choose + y * eta - n * np.logaddexp(0.0, eta)))


def grad_hess_eta(block: ObservationBlock, eta, theta1: Mapping[str, float]) -> tuple[np.ndarray, np.ndarray]:
    """
    Derivatives of the log-likelihood in eta.

    Returns:
        (gradient, c) with c = -d2 log l / d eta2 per observation
    """
    eta = _check_eta(block, eta)
    y = block.values
    family = block.likelihood.family
    if family == LikelihoodFamily.GAUSSIAN:
        tau = observation_precision(block, theta1)
        return tau * (y - eta), tau
    if family == LikelihoodFamily.POISSON:
        mu = np.exp(eta)
        return y - mu, np.maximum(mu, CURVATURE_FLOOR)
    p = expit(eta)
    if family == LikelihoodFamily.BERNOULLI:
        return y - p, np.maximum(p * (1.0 - p), CURVATURE_FLOOR)
    n = _trials(block)
    return y - n * p, np.maximum(n * p * (1.0 - p), CURVATURE_FLOOR)
