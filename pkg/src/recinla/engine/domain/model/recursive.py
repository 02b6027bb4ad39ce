#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 26, 2025 10:12:55$"

from dataclasses import dataclass

import numpy as np

from recinla.engine.domain.model.approx import HyperGrid
from recinla.engine.domain.model.assembly import ModelAssembly


@dataclass(frozen=True)
class DriftDiagnostics:
    per_step_mode_shift: float
    boundary_mass_fraction: float
    argmax_index: int
    flagged: bool = False


@dataclass(frozen=True)
class PointRecord:
    """Outcome of one support point within one step."""
    conditional_log_likelihood: float
    iterations: int
    converged: bool
    failed: bool = False


@dataclass(frozen=True)
class RecursiveState:
    """
    Snapshot after `step` partitions.

    history[0] holds the step-1 log densities, history[i] the conditional
    log marginal likelihoods of partition i + 1. grid.points never change.
    """
    model: ModelAssembly
    grid: HyperGrid
    priors: tuple
    step: int
    history: tuple
    diagnostics: tuple
    records: tuple
    failed: np.ndarray
    initial_mode_index: int

    @property
    def accumulated(self) -> np.ndarray:
        return np.sum(np.vstack(self.history), axis=0)
