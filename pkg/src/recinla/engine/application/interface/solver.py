#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 25, 2025 10:02:14$"

from abc import ABC, abstractmethod

import numpy as np

from recinla.engine.domain.model.sparse import CholeskyFactor, SparseSymmetric


class BaseCholeskySolver(ABC):
    @abstractmethod
    def cholesky(self, q: SparseSymmetric) -> CholeskyFactor:
        pass

    @abstractmethod
    def solve(self, factor: CholeskyFactor, rhs: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def marginal_variances(self, factor: CholeskyFactor) -> np.ndarray:
        pass

    @abstractmethod
    def sample(self, factor: CholeskyFactor, mean: np.ndarray, seed: int) -> np.ndarray:
        pass
