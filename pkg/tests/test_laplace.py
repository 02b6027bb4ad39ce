#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 30, 2025 14:18:52$"

import numpy as np
import pytest

from conftest import iid_gaussian_model, single_node_model
from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.application.use_case.oracle import oracle_conjugate_gaussian
from recinla.engine.application.use_case.recipes import random_gaussian_model
from recinla.engine.domain.const.model import ExplorationStrategy, LikelihoodFamily
from recinla.engine.domain.model.hyper import HyperPrior
from recinla.engine.infrastructure.config import EngineConfig


class TestGaussianApproximation:
    """Conditional posterior at fixed theta against the dense closed form."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    @pytest.mark.parametrize("constrained", [False, True])
    def test_matches_conjugate_posterior(self, laplace, seed, constrained):
        """Mode, constrained variances and log p(y | theta) agree with dense algebra."""
        model, theta = random_gaussian_model(seed, constrained=constrained)
        exact = oracle_conjugate_gaussian(model, theta)
        value, approx = laplace.conditional_log_evidence(model, theta)

        assert approx.converged
        assert np.allclose(approx.mode, exact.mean, rtol=0.0, atol=1e-8)
        assert np.allclose(laplace.constrained_variances(approx), np.diag(exact.covariance), rtol=1e-8, atol=1e-10)
        assert value == pytest.approx(exact.log_evidence, abs=1e-7)

    def test_constrained_mode_satisfies_constraint(self, laplace):
        """The sum-to-zero block sums to zero at the mode."""
        model, theta = random_gaussian_model(7, constrained=True)
        _, approx = laplace.conditional_log_evidence(model, theta)
        assert abs(np.sum(approx.mode[model.block_slice("iid")])) < 1e-10

    def test_no_observations_returns_prior(self, laplace):
        """An empty model is its own posterior with zero evidence."""
        model, theta = random_gaussian_model(3)
        empty = model.with_observations(())
        value, approx = laplace.conditional_log_evidence(empty, theta)
        prior = laplace.latent_prior(empty, theta)
        assert value == pytest.approx(0.0, abs=1e-10)
        assert np.allclose(approx.mode, prior.mode)

    def test_poisson_mode_is_score_root(self, laplace):
        """For one node with N(0, 1/tau) prior: sum(y - exp(x)) - tau x = 0."""
        y = np.array([3.0, 5.0, 4.0, 2.0, 6.0])
        model = single_node_model(y, family=LikelihoodFamily.POISSON, free_tau=False, tau=2.0)
        approx = laplace.gaussian_approximation(model, [])
        x = float(approx.mode[0])
        assert approx.converged
        assert np.sum(y - np.exp(x)) - 2.0 * x == pytest.approx(0.0, abs=1e-6)

    def test_damped_steps_do_not_count_as_converged(self, laplace, monkeypatch):
        """A line search that only accepts tiny steps leaves the mode unconverged."""
        y = np.array([3.0, 5.0, 4.0, 2.0, 6.0])
        model = single_node_model(y, family=LikelihoodFamily.POISSON, free_tau=False, tau=2.0)
        original = laplace.total_loglik

        def walled(model, values, eta):
            if np.max(np.abs(eta)) > 5e-9:
                return float("-inf")
            return original(model, values, eta)

        monkeypatch.setattr(laplace, "total_loglik", walled)
        approx = laplace.gaussian_approximation(model, [])
        assert not approx.converged
        assert abs(float(approx.mode[0])) <= 5e-9

    def test_latent_prior_dimension_checked(self, laplace):
        """A recursion prior of the wrong size is rejected."""
        model, theta = random_gaussian_model(0)
        other = single_node_model([1.0], free_tau=False)
        wrong = laplace.latent_prior(other, [])
        with pytest.raises(ValueError):
            laplace.gaussian_approximation(model, theta, wrong)


class ShiftedPrior(HyperPrior):

    def __init__(self, base: HyperPrior, shift: float):
        self.base = base
        self.shift = shift

    def log_density(self, value: float) -> float:
        return self.base.log_density(value) + self.shift


class TestLogHyperPosterior:

    @pytest.mark.parametrize("seed", [0, 5])
    def test_gaussian_is_evidence_plus_prior(self, laplace, seed):
        """Laplace is exact for gaussians, so only the hyper prior is added to the evidence."""
        model, theta = random_gaussian_model(seed)
        value, approx = laplace.log_hyper_posterior(model, theta)
        exact = oracle_conjugate_gaussian(model, theta)
        assert value == pytest.approx(exact.log_evidence + model.hyper_layout.prior_log_density(theta), abs=1e-7)
        assert np.allclose(approx.mode, exact.mean, atol=1e-8)

    def test_prior_constant_shifts_output(self, laplace):
        model = iid_gaussian_model(seed=2)
        theta = [0.3, 1.2]
        base = model.hyper_layout.get("u_tau").prior
        shifted = model.with_layout(model.hyper_layout.with_priors({"u_tau": ShiftedPrior(base, 3.5)}))
        plain, _ = laplace.log_hyper_posterior(model, theta)
        moved, _ = laplace.log_hyper_posterior(shifted, theta)
        assert moved - plain == pytest.approx(3.5, abs=1e-10)


class TestFit:
    """Exploration, support point weights and summaries."""

    def test_iid_gaussian_fit(self, laplace):
        """Two hyperparameters use an axis grid and produce normalized marginals."""
        model = iid_gaussian_model(seed=1)
        result = laplace.fit(model)
        summary = result.summary

        assert result.grid.strategy == ExplorationStrategy.AXIS_GRID
        assert len(result.approxes) == result.grid.size
        assert np.isfinite(summary.log_marginal_likelihood)
        assert [m.name for m in summary.hyper_marginals] == ["u_tau", "obs_precision"]
        for marginal in summary.hyper_marginals:
            area = np.trapezoid(marginal.internal_density, marginal.internal_grid) if hasattr(np, "trapezoid") \
                else np.trapz(marginal.internal_density, marginal.internal_grid)
            assert area == pytest.approx(1.0, abs=1e-6)
        assert summary.latent_marginals.mean.shape == (model.latent_dim,)
        assert np.all(summary.latent_marginals.sd > 0)

    def test_weights_sum_to_one(self, laplace):
        """Normalized support point weights form a distribution."""
        grid = laplace.fit(iid_gaussian_model(seed=2)).grid
        weights = grid.normalized_weights()
        assert np.all(weights >= 0)
        assert weights.sum() == pytest.approx(1.0)

    def test_fixed_hyperparameters_use_one_point(self, laplace):
        """With no free hyperparameters the grid is the single empty point."""
        model = single_node_model([1.0, 2.0], family=LikelihoodFamily.POISSON, free_tau=False)
        result = laplace.fit(model)
        assert result.grid.size == 1
        assert result.summary.hyper_marginals == ()

    @pytest.mark.slow
    def test_ccd_beyond_two_hyperparameters(self, solver):
        """AUTO switches to the central composite design beyond two dimensions."""
        model, _ = random_gaussian_model(5, n_obs=40)
        model = model.with_layout(model.hyper_layout.with_initial([0.0, 0.0, 0.0, 0.5]))
        engine = LaplaceEngine(solver, EngineConfig(strategy="auto"))
        grid = engine.explore_hyperparameters(model)
        assert grid.strategy == ExplorationStrategy.CCD_LITE
        assert grid.dim == 4
        assert np.isfinite(grid.log_density[grid.mode_index])

    def test_refit_on_given_grid_keeps_points(self, laplace):
        """Passing a grid re-evaluates its points without exploring."""
        model = iid_gaussian_model(seed=3)
        first = laplace.fit(model)
        again = laplace.fit(model, first.grid)
        assert np.array_equal(again.grid.points, first.grid.points)
        assert np.allclose(again.grid.log_density, first.grid.log_density, atol=1e-9)


class TestLinearCombination:
    """Posterior moments of a^T x."""

    def test_single_node_matches_marginal(self, laplace):
        """a = e_1 reproduces the node's mixture mean and sd."""
        model = single_node_model([3.0, 5.0, 4.0], family=LikelihoodFamily.POISSON)
        result = laplace.fit(model)
        mean, sd = laplace.linear_combination(result.grid, result.approxes, np.array([1.0]))
        assert mean == pytest.approx(result.summary.latent_marginals.mean[0], rel=1e-9)
        assert sd == pytest.approx(result.summary.latent_marginals.sd[0], rel=1e-9)

    @pytest.mark.slow
    def test_sum_of_constrained_block_is_zero(self, laplace):
        """A combination along the constraint has zero mean and variance."""
        model, theta = random_gaussian_model(1, constrained=True)
        result = laplace.fit(model.with_layout(model.hyper_layout.with_initial(theta)))
        vector = np.zeros(model.latent_dim)
        vector[model.block_slice("iid")] = 1.0
        mean, sd = laplace.linear_combination(result.grid, result.approxes, vector)
        assert mean == pytest.approx(0.0, abs=1e-8)
        assert sd == pytest.approx(0.0, abs=1e-5)
