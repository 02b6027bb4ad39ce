#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 30, 2025 15:02:09$"

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.stats import norm

from conftest import iid_gaussian_model, single_node_model
from recinla.engine.application.use_case.oracle import oracle_conjugate_gaussian, oracle_quadrature_1d
from recinla.engine.application.use_case.recipes import random_gaussian_model
from recinla.engine.domain.const.model import LatentKind, LikelihoodFamily, Transform
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.hyper import HyperLayout, HyperParameter, NormalPrior
from recinla.engine.domain.model.latent import LatentBlockSpec
from recinla.engine.domain.model.likelihood import LikelihoodSpec, ObservationBlock


class TestConjugateOracle:

    def test_textbook_single_observation(self):
        """Prior N(0, 1), y = 2 with unit noise: posterior N(1, 1/2), evidence N(2 | 0, 2)."""
        model = single_node_model([2.0], family=LikelihoodFamily.GAUSSIAN, free_tau=False, tau=1.0)
        post = oracle_conjugate_gaussian(model, [])
        assert post.mean[0] == pytest.approx(1.0)
        assert post.precision[0, 0] == pytest.approx(2.0)
        assert post.covariance[0, 0] == pytest.approx(0.5)
        assert post.log_evidence == pytest.approx(norm.logpdf(2.0, loc=0.0, scale=np.sqrt(2.0)))

    def test_constrained_mean_is_feasible(self):
        """Conditioning puts the mean on the constraint and removes that variance."""
        model, theta = random_gaussian_model(2, constrained=True)
        post = oracle_conjugate_gaussian(model, theta)
        sl = model.block_slice("iid")
        ones = np.zeros(model.latent_dim)
        ones[sl] = 1.0
        assert abs(post.mean[sl].sum()) < 1e-10
        assert float(ones @ post.covariance @ ones) == pytest.approx(0.0, abs=1e-10)

    def test_no_observations_gives_prior(self):
        """Without data the posterior is the prior and the evidence is zero."""
        model, theta = random_gaussian_model(4)
        post = oracle_conjugate_gaussian(model.with_observations(()), theta)
        assert np.allclose(post.mean, 0.0)
        assert post.log_evidence == 0.0

    def test_rejects_non_gaussian(self):
        """Poisson blocks have no conjugate form."""
        model = single_node_model([1.0, 3.0], family=LikelihoodFamily.POISSON, free_tau=False)
        with pytest.raises(ModelValidationError):
            oracle_conjugate_gaussian(model, [])


class TestQuadratureOracle:

    def test_agrees_with_conjugate(self):
        """Fixed theta gaussian: quadrature moments and evidence equal the closed form."""
        model = single_node_model([2.0, 1.5], family=LikelihoodFamily.GAUSSIAN, free_tau=False, tau=1.0)
        exact = oracle_conjugate_gaussian(model, [])
        quad = oracle_quadrature_1d(model, np.linspace(-8.0, 10.0, 4001))
        assert quad.x_mean == pytest.approx(exact.mean[0], abs=1e-6)
        assert quad.x_sd == pytest.approx(np.sqrt(exact.covariance[0, 0]), abs=1e-6)
        assert quad.log_evidence == pytest.approx(exact.log_evidence, abs=1e-6)
        assert quad.x_mode == pytest.approx(exact.mean[0], abs=1e-4)

    def test_poisson_posterior_mode(self):
        """The x mode is the root of sum(y - exp(x)) - tau x."""
        y = np.array([4.0, 6.0, 5.0])
        model = single_node_model(y, family=LikelihoodFamily.POISSON, free_tau=False, tau=1.0)
        quad = oracle_quadrature_1d(model, np.linspace(-2.0, 4.0, 6001))
        x = quad.x_mode
        assert np.sum(y - np.exp(x)) - x == pytest.approx(0.0, abs=1e-3)

    def test_conditional_evidence_with_free_tau(self):
        """Per-theta evidence matches the conjugate evidence at that theta."""
        model = single_node_model([0.8, 1.4, 1.1], family=LikelihoodFamily.GAUSSIAN, free_tau=True)
        thetas = np.linspace(-3.0, 3.0, 61)
        quad = oracle_quadrature_1d(model, np.linspace(-10.0, 10.0, 4001), thetas)
        for k in (0, 30, 60):
            exact = oracle_conjugate_gaussian(model, [thetas[k]])
            assert quad.log_conditional_evidence[k] == pytest.approx(exact.log_evidence, abs=1e-6)
        assert quad.theta_density.shape == thetas.shape
        assert quad.theta_mode is not None

    def test_requires_theta_grid(self):
        """A free hyperparameter needs its own grid."""
        model = single_node_model([1.0], family=LikelihoodFamily.POISSON, free_tau=True)
        with pytest.raises(ModelValidationError):
            oracle_quadrature_1d(model, np.linspace(-3.0, 3.0, 11))

    def test_rejects_large_latent(self):
        """More than one latent node is out of reach."""
        with pytest.raises(ModelValidationError):
            oracle_quadrature_1d(iid_gaussian_model(), np.linspace(-3.0, 3.0, 11))

    def test_rejects_two_hyperparameters(self):
        """Two free hyperparameters would need a three-dimensional grid."""
        latent = (LatentBlockSpec(kind=LatentKind.IID, name="x", n=1, hyper_bindings={"tau": "x_tau"}),)
        layout = HyperLayout((
            HyperParameter("x_tau", Transform.LOG, NormalPrior(0.0, 1.0)),
            HyperParameter("noise", Transform.LOG, NormalPrior(0.0, 1.0)),
        ))
        block = ObservationBlock(
            values=np.array([1.0]),
            predictor_rows=sp.csr_matrix(np.ones((1, 1))),
            likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, hyper_bindings={"precision": "noise"}),
        )
        with pytest.raises(ModelValidationError):
            oracle_quadrature_1d(ModelAssembly(latent, (block,), layout), np.linspace(-3.0, 3.0, 11), [0.0])


class TestEngineAgainstQuadrature:
    """The nested Laplace fit against brute-force integration on a tiny Poisson problem."""

    @pytest.mark.slow
    def test_latent_and_evidence(self, laplace):
        """Latent moments within 0.05 and log evidence within 0.1."""
        y = np.array([3.0, 5.0, 4.0, 2.0, 6.0])
        model = single_node_model(y, family=LikelihoodFamily.POISSON, free_tau=True)
        quad = oracle_quadrature_1d(model, np.linspace(-3.0, 4.0, 1401), np.linspace(-6.0, 6.0, 241))
        summary = laplace.fit(model).summary

        assert summary.latent_marginals.mean[0] == pytest.approx(quad.x_mean, abs=0.05)
        assert summary.latent_marginals.sd[0] == pytest.approx(quad.x_sd, abs=0.05)
        assert summary.log_marginal_likelihood == pytest.approx(quad.log_evidence, abs=0.1)
        tau = summary.hyper("x_tau")
        quad_mean = np.sum(quad.theta_grid * quad.theta_density) * (quad.theta_grid[1] - quad.theta_grid[0])
        assert tau.internal_mean == pytest.approx(quad_mean, abs=0.15)
