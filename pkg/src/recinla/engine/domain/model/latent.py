#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 10:37:26$"

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from recinla.engine.domain.const.model import LATENT_ROLES, LatentKind
from recinla.engine.domain.const.numeric import FIXED_EFFECT_PRECISION
from recinla.engine.domain.model.errors import ModelValidationError


@dataclass(frozen=True)
class LinearConstraint:
    """a^T x = c on the nodes of one block."""
    vector: np.ndarray
    value: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=np.float64).ravel())

    @classmethod
    def sum_to_zero(cls, n: int) -> "LinearConstraint":
        return cls(vector=np.ones(n), value=0.0)


@dataclass(frozen=True)
class LatentBlockSpec:
    """
    One block of the latent field.

    Size parameters by kind:
        iid, rw1, ar1, fixed_effect: n
        lattice_matern: nrow, ncol
        kronecker_ar1_lattice: n_time, nrow, ncol (time-major node order)
        mvn_dense: n_sources, n_replicates (replicate-major node order)

    hyper_bindings maps a role (tau, rho, range, or tau_<i> / rho_<i>_<j>
    for mvn_dense) to a hyperparameter name; fixed_params maps a role to a
    natural-scale constant instead. precision_scale multiplies the block
    precision (used for fractionated priors).
    """
    kind: LatentKind
    name: str
    n: int = 0
    nrow: int = 0
    ncol: int = 0
    n_time: int = 0
    n_sources: int = 0
    n_replicates: int = 1
    hyper_bindings: Mapping[str, str] = field(default_factory=dict)
    fixed_params: Mapping[str, float] = field(default_factory=dict)
    constraints: tuple = ()
    prior_mean: Optional[np.ndarray] = None
    prior_precision: Optional[np.ndarray] = None
    precision_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LatentKind(self.kind))
        object.__setattr__(self, "hyper_bindings", dict(self.hyper_bindings))
        object.__setattr__(self, "fixed_params", {k: float(v) for k, v in dict(self.fixed_params).items()})
        constraints = tuple(self.constraints or ())
        if self.kind == LatentKind.RW1 and not constraints:
            constraints = (LinearConstraint.sum_to_zero(self.n),)
        object.__setattr__(self, "constraints", constraints)

        if self.size < 1:
            raise ModelValidationError(f"block '{self.name}' has no nodes")
        if self.kind == LatentKind.RW1 and self.n < 2:
            raise ModelValidationError(f"rw1 block '{self.name}' needs n >= 2")
        for constraint in self.constraints:
            if constraint.vector.size != self.size:
                raise ModelValidationError(
                    f"constraint length {constraint.vector.size} != block size {self.size} in '{self.name}'"
                )
        missing = [role for role in self.roles if role not in self.hyper_bindings and role not in self.fixed_params]
        if missing:
            raise ModelValidationError(f"block '{self.name}' lacks bindings for roles {missing}")
        if self.kind == LatentKind.FIXED_EFFECT:
            mean = np.zeros(self.n) if self.prior_mean is None else np.broadcast_to(
                np.asarray(self.prior_mean, dtype=np.float64), (self.n,)).copy()
            prec = np.full(self.n, FIXED_EFFECT_PRECISION) if self.prior_precision is None else np.broadcast_to(
                np.asarray(self.prior_precision, dtype=np.float64), (self.n,)).copy()
            if np.any(prec <= 0):
                raise ModelValidationError(f"fixed effect '{self.name}' needs positive prior precision")
            object.__setattr__(self, "prior_mean", mean)
            object.__setattr__(self, "prior_precision", prec)

    @property
    def size(self) -> int:
        if self.kind == LatentKind.LATTICE_MATERN:
            return self.nrow * self.ncol
        if self.kind == LatentKind.KRONECKER_AR1_LATTICE:
            return self.n_time * self.nrow * self.ncol
        if self.kind == LatentKind.MVN_DENSE:
            return self.n_sources * self.n_replicates
        return self.n

    @property
    def roles(self) -> tuple:
        if self.kind == LatentKind.MVN_DENSE:
            taus = tuple(f"tau_{i + 1}" for i in range(self.n_sources))
            rhos = tuple(
                f"rho_{i + 1}_{j + 1}" for i in range(self.n_sources) for j in range(i + 1, self.n_sources)
            )
            return taus + rhos
        return LATENT_ROLES[self.kind]

    @property
    def is_intrinsic(self) -> bool:
        return self.kind == LatentKind.RW1

    @property
    def is_random(self) -> bool:
        return self.kind != LatentKind.FIXED_EFFECT
