#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Dec 02, 2025 09:52:16$"

import numpy as np
import pytest

from conftest import iid_gaussian_model
from recinla.engine.application.use_case.exploration import ccd_design
from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.application.use_case.marginals import hyper_marginals
from recinla.engine.application.use_case.recursive import RecursiveEngine
from recinla.engine.domain.const.model import ExplorationStrategy, Transform
from recinla.engine.domain.model.approx import HyperGrid
from recinla.engine.infrastructure.config import EngineConfig

THETA_MODE = np.array([1.0, -1.0, 0.5])
SCALING = np.array([[0.5, 0.1, 0.0], [0.0, 2.0, 0.3], [0.2, 0.0, 1.0]])


def ccd_grid(log_density_fn) -> HyperGrid:
    """A 3-d ccd design with densities given as a function of z."""
    z, weights, shell = ccd_design(3, 1.1)
    log_density = np.array([log_density_fn(row) for row in z])
    return HyperGrid(
        points=THETA_MODE + z @ SCALING.T,
        log_density=log_density,
        weights=weights,
        mode_index=int(np.argmax(log_density)),
        curvature=np.eye(3),
        theta_mode=THETA_MODE,
        scaling=SCALING,
        z_points=z,
        strategy=ExplorationStrategy.CCD_LITE,
        shell=shell,
        names=("a", "b", "c"),
        transforms=(Transform.IDENTITY, Transform.IDENTITY, Transform.LOG),
    )


class TestCcdDesign:

    @pytest.mark.parametrize("dim", [2, 3, 4, 5, 6])
    def test_weights_integrate_gaussian_mass_and_second_moment(self, dim):
        """sum w exp(-|z|^2/2) is (2 pi)^(d/2) and every coordinate has unit second moment."""
        z, weights, shell = ccd_design(dim, 1.1)
        norm = (2.0 * np.pi) ** (dim / 2.0)
        density = weights * np.exp(-0.5 * np.sum(z * z, axis=1))
        assert np.sum(density) == pytest.approx(norm, rel=1e-10)
        assert np.allclose(density @ (z * z), norm, rtol=1e-10)
        assert weights[0] > 0
        assert np.allclose(np.linalg.norm(z[shell], axis=1), 1.1 * np.sqrt(dim))


class TestCcdMarginals:
    """Hyper marginals of a ccd design follow all of its densities."""

    def test_off_centre_gaussian_recovered(self):
        """A correlated gaussian peaked away from the design centre is fitted exactly."""
        centre = np.array([0.6, -0.4, 0.3])
        cov = np.array([[1.5, 0.3, 0.0], [0.3, 0.8, 0.1], [0.0, 0.1, 0.5]])
        precision = np.linalg.inv(cov)
        grid = ccd_grid(lambda z: 7.0 - 0.5 * (z - centre) @ precision @ (z - centre))

        marginals = hyper_marginals(grid, 81)
        means = THETA_MODE + SCALING @ centre
        sds = np.sqrt(np.diag(SCALING @ cov @ SCALING.T))
        for j, marginal in enumerate(marginals):
            assert not marginal.degenerate
            assert marginal.internal_mean == pytest.approx(means[j], abs=1e-6)
            assert marginal.internal_sd == pytest.approx(sds[j], rel=1e-4)

    def test_mean_not_pinned_to_design_centre(self):
        """Moving the peak moves every marginal mean by S @ shift."""
        shift = np.array([0.9, 0.0, -0.5])
        still = hyper_marginals(ccd_grid(lambda z: -0.5 * z @ z), 41)
        moved = hyper_marginals(ccd_grid(lambda z: -0.5 * (z - shift) @ (z - shift)), 41)
        expected = SCALING @ shift
        for j in range(3):
            assert moved[j].internal_mean - still[j].internal_mean == pytest.approx(expected[j], abs=1e-6)

    def test_non_concave_densities_use_weighted_moments(self):
        """A bowl-shaped log density is summarized by design moments, marked degenerate."""
        grid = ccd_grid(lambda z: 0.1 * z @ z)
        marginals = hyper_marginals(grid, 41)
        for marginal in marginals:
            assert marginal.degenerate
            assert np.isfinite(marginal.internal_mean)
            assert marginal.internal_sd > 0
            area = np.trapezoid(marginal.internal_density, marginal.internal_grid) if hasattr(np, "trapezoid") \
                else np.trapz(marginal.internal_density, marginal.internal_grid)
            assert area == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.slow
    def test_recursive_uneven_split_tracks_full_fit(self, solver):
        """A small first partition still gives hyper means near the full-data fit."""
        engine = LaplaceEngine(solver, EngineConfig(strategy="ccd_lite", latent_grid_points=41, hyper_grid_points=41))
        recursive = RecursiveEngine(engine)
        model = iid_gaussian_model(seed=3)
        block = model.observation_blocks[0]
        order = np.random.default_rng(0).permutation(block.size)
        parts = [(block.subset(np.sort(order[:10])),), (block.subset(np.sort(order[10:])),)]

        summary = recursive.finalize(recursive.run(model, parts))
        full = engine.fit(model).summary
        for ours, reference in zip(summary.hyper_marginals, full.hyper_marginals):
            assert ours.internal_mean == pytest.approx(reference.internal_mean, abs=0.5 * reference.internal_sd)
