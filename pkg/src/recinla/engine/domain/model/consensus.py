#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 26, 2025 15:31:08$"

from dataclasses import dataclass

import numpy as np

from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.sparse import SparseSymmetric


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    precision: float

    def __post_init__(self):
        if not self.precision > 0:
            raise ModelValidationError(f"precision must be positive, got {self.precision}")

    @property
    def sd(self) -> float:
        return float(1.0 / np.sqrt(self.precision))


@dataclass(frozen=True)
class GaussianBelief:
    mean: np.ndarray
    precision: SparseSymmetric

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).ravel()
        if mean.size != self.precision.dim:
            raise ModelValidationError(f"mean length {mean.size} != precision dim {self.precision.dim}")
        object.__setattr__(self, "mean", mean)
