#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 11:15:40$"

from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from recinla.engine.domain.const.model import Transform
from recinla.engine.domain.model.errors import ModelValidationError

_LOG_2PI = float(np.log(2.0 * np.pi))


def to_natural(transform: Transform, value):
    """Map an internal-scale value to the natural scale."""
    value = np.asarray(value, dtype=np.float64)
    if transform == Transform.LOG:
        return np.exp(value)
    if transform == Transform.FISHER_Z:
        return np.tanh(value)
    return value


def to_internal(transform: Transform, value):
    value = np.asarray(value, dtype=np.float64)
    if transform == Transform.LOG:
        if np.any(value <= 0):
            raise ModelValidationError("log-transformed hyperparameter must be positive")
        return np.log(value)
    if transform == Transform.FISHER_Z:
        if np.any(np.abs(value) >= 1):
            raise ModelValidationError("correlation must lie in (-1, 1)")
        return np.arctanh(value)
    return value


def internal_jacobian(transform: Transform, natural):
    """|d internal / d natural|, used to move densities to the natural scale."""
    natural = np.asarray(natural, dtype=np.float64)
    if transform == Transform.LOG:
        return 1.0 / natural
    if transform == Transform.FISHER_Z:
        return 1.0 / (1.0 - natural ** 2)
    return np.ones_like(natural)


class HyperPrior(ABC):
    @abstractmethod
    def log_density(self, value: float) -> float:
        """Log density on the internal scale."""


@dataclass(frozen=True)
class NormalPrior(HyperPrior):
    mean: float = 0.0
    sd: float = 10.0

    def __post_init__(self):
        if self.sd <= 0:
            raise ModelValidationError(f"prior sd must be positive, got {self.sd}")

    def log_density(self, value: float) -> float:
        z = (value - self.mean) / self.sd
        return float(-0.5 * _LOG_2PI - np.log(self.sd) - 0.5 * z * z)


@dataclass(frozen=True)
class LogGammaPrior(HyperPrior):
    """Gamma(shape, rate) on a precision, expressed as a density of its logarithm."""
    shape: float = 1.0
    rate: float = 5e-5

    def log_density(self, value: float) -> float:
        return float(
            self.shape * np.log(self.rate) - gammaln(self.shape) + self.shape * value - self.rate * np.exp(value)
        )


@dataclass(frozen=True)
class HyperParameter:
    name: str
    transform: Transform = Transform.LOG
    prior: HyperPrior = field(default_factory=NormalPrior)
    initial: float = 0.0
    fixed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "transform", Transform(self.transform))


@dataclass(frozen=True)
class HyperLayout:
    """
    Ordered hyperparameters. Free entries form the internal vector theta
    explored by the engine; fixed entries are held at their initial value.
    """
    parameters: tuple = ()

    def __post_init__(self):
        params = tuple(self.parameters)
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ModelValidationError(f"duplicate hyperparameter names in {names}")
        object.__setattr__(self, "parameters", params)

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.parameters]

    @property
    def free(self) -> list[HyperParameter]:
        return [p for p in self.parameters if not p.fixed]

    @property
    def free_names(self) -> list[str]:
        return [p.name for p in self.free]

    @property
    def dim(self) -> int:
        return len(self.free)

    def get(self, name: str) -> HyperParameter:
        for param in self.parameters:
            if param.name == name:
                return param
        raise ModelValidationError(f"unknown hyperparameter '{name}'")

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def initial_point(self) -> np.ndarray:
        return np.array([p.initial for p in self.free], dtype=np.float64)

    def theta_values(self, theta: Sequence[float]) -> dict[str, float]:
        """Internal-scale value of every hyperparameter, fixed ones included."""
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        if theta.size != self.dim:
            raise ModelValidationError(f"theta has length {theta.size}, layout expects {self.dim}")
        values = {}
        it = iter(theta)
        for param in self.parameters:
            values[param.name] = param.initial if param.fixed else float(next(it))
        return values

    def natural_values(self, theta: Sequence[float]) -> dict[str, float]:
        internal = self.theta_values(theta)
        return {p.name: float(to_natural(p.transform, internal[p.name])) for p in self.parameters}

    def prior_log_density(self, theta: Sequence[float]) -> float:
        values = self.theta_values(theta)
        return float(sum(p.prior.log_density(values[p.name]) for p in self.free))

    def with_priors(self, priors: Mapping[str, HyperPrior]) -> "HyperLayout":
        params = tuple(replace(p, prior=priors[p.name]) if p.name in priors else p for p in self.parameters)
        return HyperLayout(params)

    def with_initial(self, theta: Sequence[float]) -> "HyperLayout":
        values = self.theta_values(theta)
        return HyperLayout(tuple(replace(p, initial=values[p.name]) for p in self.parameters))

    def merged(self, extra: Sequence[HyperParameter]) -> "HyperLayout":
        """Append parameters whose names are not present yet."""
        known = set(self.names)
        return HyperLayout(self.parameters + tuple(p for p in extra if p.name not in known))
