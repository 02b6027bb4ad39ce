#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 25, 2025 08:47:33$"

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from recinla.engine.domain.const.model import ExplorationStrategy
from recinla.engine.domain.model.assembly import ConstraintSet
from recinla.engine.domain.model.sparse import CholeskyFactor, SparseSymmetric


@dataclass(frozen=True)
class GaussianApprox:
    """
    Gaussian N(mode, precision^-1), optionally conditioned on C x = e.

    Used both for per-support-point posteriors and for the latent prior
    built from the blocks (iterations = 0 in that case).
    """
    mode: np.ndarray
    precision: SparseSymmetric
    factor: CholeskyFactor
    log_gauss_at_mode: float
    constraints: Optional[ConstraintSet] = None
    converged: bool = True
    iterations: int = 0
    objective_trace: tuple = ()

    @property
    def dim(self) -> int:
        return int(self.mode.size)


@dataclass(frozen=True)
class HyperGrid:
    """
    Support points theta^k on the internal scale.

    z_points are the standardized coordinates, theta = theta_mode + scaling @ z.
    lattice_index holds integer axis-grid coordinates (axis grid only);
    shell marks the outermost support points.
    """
    points: np.ndarray
    log_density: np.ndarray
    weights: np.ndarray
    mode_index: int
    curvature: np.ndarray
    theta_mode: np.ndarray
    scaling: np.ndarray
    z_points: np.ndarray
    strategy: ExplorationStrategy
    step_size: float = 1.0
    lattice_index: Optional[np.ndarray] = None
    shell: Optional[np.ndarray] = None
    names: tuple = ()
    transforms: tuple = ()

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1]) if self.points.ndim == 2 else 0

    def normalized_weights(self) -> np.ndarray:
        """w_k proportional to exp(log_density_k) * Delta_k, summing to one."""
        finite = np.isfinite(self.log_density)
        w = np.zeros(self.size)
        if not np.any(finite):
            return w
        shifted = self.log_density[finite] - self.log_density[finite].max()
        raw = np.exp(shifted) * self.weights[finite]
        w[finite] = raw / raw.sum()
        return w

    def with_log_density(self, log_density: np.ndarray) -> "HyperGrid":
        return replace(self, log_density=np.asarray(log_density, dtype=np.float64))


@dataclass(frozen=True)
class LatentMarginals:
    mean: np.ndarray
    sd: np.ndarray
    grid: np.ndarray
    density: np.ndarray


@dataclass(frozen=True)
class HyperMarginal:
    name: str
    internal_grid: np.ndarray
    internal_density: np.ndarray
    natural_grid: np.ndarray
    natural_density: np.ndarray
    internal_mean: float
    internal_sd: float
    natural_mean: float
    natural_mode: float
    degenerate: bool = False


@dataclass(frozen=True)
class PosteriorSummary:
    latent_marginals: LatentMarginals
    hyper_marginals: tuple
    log_marginal_likelihood: float
    method: str = "full"
    metadata: dict = field(default_factory=dict)

    def hyper(self, name: str) -> HyperMarginal:
        for marginal in self.hyper_marginals:
            if marginal.name == name:
                return marginal
        raise KeyError(name)


class FitResult(NamedTuple):
    summary: PosteriorSummary
    grid: HyperGrid
    approxes: list
