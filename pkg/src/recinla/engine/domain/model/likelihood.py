#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 13:02:44$"

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
import scipy.sparse as sp

from recinla.engine.domain.const.model import SUPPORTED_PAIRS, LikelihoodFamily, LinkFunction
from recinla.engine.domain.model.errors import ModelValidationError


@dataclass(frozen=True)
class LikelihoodSpec:
    """
    Observation model.

    hyper_bindings: {"precision": <name>} for gaussian; the named
    hyperparameter is the log precision tau, or log psi when the block
    carries precision scales phi. fixed_log_precision is used when no
    binding is given.
    """
    family: LikelihoodFamily
    link: Optional[LinkFunction] = None
    hyper_bindings: Mapping[str, str] = field(default_factory=dict)
    trials: Optional[np.ndarray] = None
    fixed_log_precision: float = 0.0

    def __post_init__(self):
        family = LikelihoodFamily(self.family)
        default_links = {
            LikelihoodFamily.GAUSSIAN: LinkFunction.IDENTITY,
            LikelihoodFamily.POISSON: LinkFunction.LOG,
            LikelihoodFamily.BERNOULLI: LinkFunction.LOGIT,
            LikelihoodFamily.BINOMIAL: LinkFunction.LOGIT,
        }
        link = default_links[family] if self.link is None else LinkFunction(self.link)
        if (family, link) not in SUPPORTED_PAIRS:
            raise ModelValidationError(f"unsupported family/link pair ({family.value}, {link.value})")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "link", link)
        object.__setattr__(self, "hyper_bindings", dict(self.hyper_bindings))
        if self.trials is not None:
            if family != LikelihoodFamily.BINOMIAL:
                raise ModelValidationError("trials are only meaningful for the binomial family")
            object.__setattr__(self, "trials", np.asarray(self.trials, dtype=np.float64))
        elif family == LikelihoodFamily.BINOMIAL:
            raise ModelValidationError("binomial likelihood requires trials")

    @property
    def precision_binding(self) -> Optional[str]:
        return self.hyper_bindings.get("precision")


@dataclass(frozen=True)
class ObservationBlock:
    """
    Observed values with their design.

    The linear predictor is eta = (predictor_rows + alpha * scaled_rows) x,
    where alpha is the hyperparameter named by scale_binding (identity
    scale) or the constant scale_value.
    """
    values: np.ndarray
    predictor_rows: sp.csr_matrix
    likelihood: LikelihoodSpec
    precision_scales: Optional[np.ndarray] = None
    scaled_rows: Optional[sp.csr_matrix] = None
    scale_binding: Optional[str] = None
    scale_value: float = 1.0
    name: str = "obs"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).ravel()
        rows = sp.csr_matrix(self.predictor_rows)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "predictor_rows", rows)
        if rows.shape[0] != values.size:
            raise ModelValidationError(
                f"block '{self.name}': {values.size} values but {rows.shape[0]} predictor rows"
            )
        if self.scaled_rows is not None:
            scaled = sp.csr_matrix(self.scaled_rows)
            if scaled.shape != rows.shape:
                raise ModelValidationError(f"block '{self.name}': scaled rows shape {scaled.shape} != {rows.shape}")
            object.__setattr__(self, "scaled_rows", scaled)
        if self.precision_scales is not None:
            phi = np.asarray(self.precision_scales, dtype=np.float64).ravel()
            if phi.size != values.size or np.any(phi <= 0):
                raise ModelValidationError(f"block '{self.name}': precision scales must be positive, one per value")
            if self.likelihood.family != LikelihoodFamily.GAUSSIAN:
                raise ModelValidationError("precision scales are only allowed for gaussian blocks")
            object.__setattr__(self, "precision_scales", phi)
        self._check_support()

    def _check_support(self):
        family = self.likelihood.family
        y = self.values
        if not np.all(np.isfinite(y)):
            raise ModelValidationError(f"block '{self.name}' has non-finite values")
        integral = np.all(np.equal(np.floor(y), y))
        if family == LikelihoodFamily.BERNOULLI and not np.all(np.isin(y, (0.0, 1.0))):
            raise ModelValidationError(f"bernoulli block '{self.name}' needs values in {{0, 1}}")
        if family == LikelihoodFamily.POISSON and (not integral or np.any(y < 0)):
            raise ModelValidationError(f"poisson block '{self.name}' needs non-negative integers")
        if family == LikelihoodFamily.BINOMIAL:
            trials = np.broadcast_to(self.likelihood.trials, y.shape)
            if not integral or np.any(y < 0) or np.any(y > trials) or np.any(trials < 1):
                raise ModelValidationError(f"binomial block '{self.name}' needs integers in [0, trials]")

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def n_latent(self) -> int:
        return int(self.predictor_rows.shape[1])

    def design(self, alpha: float = None) -> sp.csr_matrix:
        """Design matrix for a given alpha (falls back to scale_value)."""
        if self.scaled_rows is None:
            return self.predictor_rows
        alpha = self.scale_value if alpha is None else alpha
        return sp.csr_matrix(self.predictor_rows + alpha * self.scaled_rows)

    def subset(self, index) -> "ObservationBlock":
        """Rows selected by index, keeping the block's likelihood and scaling."""
        index = np.asarray(index)
        lik = self.likelihood
        if lik.trials is not None:
            trials = np.broadcast_to(lik.trials, self.values.shape)[index]
            lik = LikelihoodSpec(lik.family, lik.link, lik.hyper_bindings, trials, lik.fixed_log_precision)
        return ObservationBlock(
            values=self.values[index],
            predictor_rows=self.predictor_rows[index],
            likelihood=lik,
            precision_scales=None if self.precision_scales is None else self.precision_scales[index],
            scaled_rows=None if self.scaled_rows is None else self.scaled_rows[index],
            scale_binding=self.scale_binding,
            scale_value=self.scale_value,
            name=self.name,
        )
