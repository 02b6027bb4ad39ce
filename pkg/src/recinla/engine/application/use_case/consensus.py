#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 27, 2025 10:48:36$"

import logging
from dataclasses import replace
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.application.use_case.marginals import mixture_marginals
from recinla.engine.domain.const.model import ConsensusMode
from recinla.engine.domain.model.approx import FitResult, GaussianApprox, PosteriorSummary
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.consensus import GaussianBelief, MomentSummary
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.hyper import NormalPrior
from recinla.engine.domain.model.sparse import SparseSymmetric

logger = logging.getLogger(__name__)


def moment_update(
    prior: MomentSummary,
    partition_posterior: MomentSummary,
    fit_prior: MomentSummary = None,
) -> MomentSummary:
    """
    Gaussian product of the prior with the data increment of one partition.

    The increment is the partition posterior with the prior used in that
    partition's fit divided out; fit_prior defaults to prior.

    Raises:
        ModelValidationError: If the extracted increment has negative precision
    """
    fit_prior = fit_prior or prior
    increment = partition_posterior.precision - fit_prior.precision
    if abs(increment) <= 1e-12 * max(partition_posterior.precision, fit_prior.precision):
        return prior
    if increment < 0:
        raise ModelValidationError(
            f"partition posterior precision {partition_posterior.precision} is below "
            f"the fit prior precision {fit_prior.precision}"
        )
    data_mean = (
        partition_posterior.precision * partition_posterior.mean - fit_prior.precision * fit_prior.mean
    ) / increment
    precision = prior.precision + increment
    return MomentSummary(mean=(prior.precision * prior.mean + increment * data_mean) / precision, precision=precision)


def consensus_weights(precisions: np.ndarray) -> np.ndarray:
    """w_ij = tau_ij / sum_j tau_ij, partitions along axis 0."""
    precisions = np.atleast_2d(np.asarray(precisions, dtype=np.float64))
    if np.any(precisions <= 0):
        raise ModelValidationError("consensus precisions must be positive")
    return precisions / precisions.sum(axis=0, keepdims=True)


def marginal_consensus(means: np.ndarray, precisions: np.ndarray) -> list[MomentSummary]:
    """
    Per-node precision-weighted consensus.

    Args:
        means: N x n partition means
        precisions: N x n partition marginal precisions
    """
    means = np.atleast_2d(np.asarray(means, dtype=np.float64))
    precisions = np.atleast_2d(np.asarray(precisions, dtype=np.float64))
    if means.shape != precisions.shape:
        raise ModelValidationError(f"means {means.shape} and precisions {precisions.shape} differ in shape")
    weights = consensus_weights(precisions)
    mean = np.sum(weights * means, axis=0)
    total = precisions.sum(axis=0)
    return [MomentSummary(float(m), float(p)) for m, p in zip(mean, total)]


class ConsensusEngine:
    """Sequential-consensus baseline over data partitions."""

    def __init__(self, laplace: LaplaceEngine, fractionate_prior: bool = True):
        """
        Args:
            laplace: Engine used for the per-partition fits
            fractionate_prior: Divide random-effect prior precisions by the number of partitions
        """
        self.laplace = laplace
        self.fractionate_prior = fractionate_prior

    def multivariate_consensus(self, beliefs: Sequence[GaussianBelief]) -> GaussianBelief:
        """Q = sum Q_j, mu = Q^-1 sum Q_j mu_j."""
        beliefs = list(beliefs)
        if not beliefs:
            raise ModelValidationError("no beliefs to combine")
        if len(beliefs) == 1:
            return beliefs[0]
        dims = {b.precision.dim for b in beliefs}
        if len(dims) != 1:
            raise ModelValidationError(f"beliefs have different dimensions {sorted(dims)}")
        precision = reduce(lambda a, b: a.plus(b), (b.precision for b in beliefs))
        rhs = np.sum([b.precision.matvec(b.mean) for b in beliefs], axis=0)
        factor = self.laplace.solver.cholesky(precision)
        return GaussianBelief(mean=self.laplace.solver.solve(factor, rhs), precision=precision)

    def _fixed_nodes(self, model: ModelAssembly) -> np.ndarray:
        offsets = model.block_offsets
        nodes = [
            np.arange(offsets[b.name], offsets[b.name] + b.size)
            for b in model.latent_blocks
            if not b.is_random
        ]
        return np.concatenate(nodes) if nodes else np.zeros(0, dtype=np.int64)

    @staticmethod
    def _fixed_moments(model: ModelAssembly) -> tuple[np.ndarray, np.ndarray]:
        blocks = [b for b in model.latent_blocks if not b.is_random]
        if not blocks:
            return np.zeros(0), np.zeros(0)
        return (
            np.concatenate([b.prior_mean for b in blocks]),
            np.concatenate([b.prior_precision for b in blocks]),
        )

    def _data_belief(
        self,
        modal: GaussianApprox,
        fixed_nodes: np.ndarray,
        fit_moments: tuple,
        base_moments: tuple,
        n_parts: int,
    ) -> GaussianBelief:
        """
        Modal belief of one partition with its fixed-effect prior swapped
        for a 1 / n_parts share of the original one.
        """
        q = self.laplace.effective_precision(modal)
        rhs = q @ modal.mode
        delta_q = np.zeros(modal.dim)
        delta_b = np.zeros(modal.dim)
        fit_mean, fit_prec = fit_moments
        base_mean, base_prec = base_moments
        delta_q[fixed_nodes] = base_prec / n_parts - fit_prec
        delta_b[fixed_nodes] = base_mean * base_prec / n_parts - fit_mean * fit_prec
        q = sp.csc_matrix(q + sp.diags(delta_q))
        precision = SparseSymmetric.from_matrix(q)
        factor = self.laplace.solver.cholesky(precision)
        return GaussianBelief(mean=self.laplace.solver.solve(factor, rhs + delta_b), precision=precision)

    def _updated_model(self, model: ModelAssembly, result: FitResult) -> ModelAssembly:
        """Next partition's model: fixed-effect and hyperparameter priors moment-updated."""
        summary = result.summary
        offsets = model.block_offsets
        blocks = []
        for block in model.latent_blocks:
            if block.is_random:
                blocks.append(block)
                continue
            sl = slice(offsets[block.name], offsets[block.name] + block.size)
            updated = [
                moment_update(MomentSummary(m0, p0), MomentSummary(m, max(1.0 / (s * s), p0)))
                for m0, p0, m, s in zip(
                    block.prior_mean, block.prior_precision, summary.latent_marginals.mean[sl],
                    summary.latent_marginals.sd[sl],
                )
            ]
            blocks.append(replace(
                block,
                prior_mean=np.array([u.mean for u in updated]),
                prior_precision=np.array([u.precision for u in updated]),
            ))

        layout = model.hyper_layout
        priors = {}
        for marginal in summary.hyper_marginals:
            sd = max(marginal.internal_sd, 1e-8)
            priors[marginal.name] = NormalPrior(marginal.internal_mean, sd)
        layout = layout.with_priors(priors)
        if layout.dim:
            layout = layout.with_initial(result.grid.theta_mode)
        return ModelAssembly(tuple(blocks), (), layout)

    def sequential_consensus_fit(
        self,
        model: ModelAssembly,
        partitions: Sequence,
        mode: ConsensusMode = ConsensusMode.MULTIVARIATE,
    ) -> PosteriorSummary:
        """
        Fit partitions in sequence, moment-updating fixed effects and
        hyperparameters, then combine the modal latent beliefs.

        Args:
            model: Model structure; its own observation blocks are ignored
            partitions: One sequence of ObservationBlock per partition
            mode: marginal or multivariate consensus
        """
        mode = ConsensusMode(mode)
        partitions = [tuple(p) for p in partitions]
        if not partitions:
            raise ModelValidationError("no partitions given")
        n_parts = len(partitions)
        if n_parts == 1:
            summary = self.laplace.fit(model.with_observations(partitions[0])).summary
            return replace(
                summary,
                method="sequential_consensus",
                metadata={**summary.metadata, "partitions": 1, "consensus": mode.value},
            )

        scale = 1.0 / n_parts if self.fractionate_prior else 1.0
        blocks = tuple(
            replace(b, precision_scale=b.precision_scale * scale) if b.is_random else b
            for b in model.latent_blocks
        )
        current = ModelAssembly(blocks, (), model.hyper_layout)
        fixed_nodes = self._fixed_nodes(model)
        base_moments = self._fixed_moments(model)

        beliefs, log_ml, last = [], 0.0, None
        for j, partition in enumerate(partitions):
            if sum(b.size for b in partition) == 0:
                logger.info(f"Consensus partition {j + 1}/{n_parts} is empty, skipped")
                continue
            result = self.laplace.fit(current.with_observations(partition))
            log_ml += result.summary.log_marginal_likelihood
            modal = result.approxes[result.grid.mode_index]
            beliefs.append(
                self._data_belief(modal, fixed_nodes, self._fixed_moments(current), base_moments, n_parts)
            )
            current = self._updated_model(current, result)
            last = result
            logger.info(f"Consensus partition {j + 1}/{n_parts} fitted")
        if last is None:
            raise ModelValidationError("all partitions are empty")

        constraints = model.constraints()
        if mode == ConsensusMode.MULTIVARIATE:
            combined = self.multivariate_consensus(beliefs)
            mean, variances = self._belief_moments(combined, constraints)
        else:
            moments = [self._belief_moments(b, constraints) for b in beliefs]
            summaries = marginal_consensus(
                np.vstack([m for m, _ in moments]),
                np.vstack([1.0 / np.maximum(v, np.finfo(float).tiny) for _, v in moments]),
            )
            mean = np.array([s.mean for s in summaries])
            variances = np.array([1.0 / s.precision for s in summaries])
            fixed_mean, fixed_prec = self._fixed_moments(current)
            mean[fixed_nodes] = fixed_mean
            variances[fixed_nodes] = 1.0 / fixed_prec

        latent = mixture_marginals(mean[None, :], variances[None, :], np.ones(1), self.laplace.settings.latent_grid_points)
        return PosteriorSummary(
            latent_marginals=latent,
            hyper_marginals=last.summary.hyper_marginals,
            log_marginal_likelihood=float(log_ml),
            method="sequential_consensus",
            metadata={
                "partitions": n_parts,
                "consensus": mode.value,
                "fractionated": self.fractionate_prior,
                "mode": [float(v) for v in last.grid.theta_mode],
                "names": list(last.grid.names),
            },
        )

    def _belief_moments(self, belief: GaussianBelief, constraints) -> tuple[np.ndarray, np.ndarray]:
        factor = self.laplace.solver.cholesky(belief.precision)
        mean = belief.mean
        if constraints is not None:
            mean = self.laplace.condition(factor, constraints, mean)
        approx = GaussianApprox(
            mode=mean,
            precision=belief.precision,
            factor=factor,
            log_gauss_at_mode=self.laplace.gaussian_normalizer(factor, constraints),
            constraints=constraints,
        )
        return mean, self.laplace.constrained_variances(approx)
