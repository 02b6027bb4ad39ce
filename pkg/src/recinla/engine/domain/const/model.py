#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 09:41:02$"

from enum import Enum


class LatentKind(str, Enum):
    IID = "iid"
    RW1 = "rw1"
    AR1 = "ar1"
    LATTICE_MATERN = "lattice_matern"
    KRONECKER_AR1_LATTICE = "kronecker_ar1_lattice"
    FIXED_EFFECT = "fixed_effect"
    MVN_DENSE = "mvn_dense"


class LikelihoodFamily(str, Enum):
    GAUSSIAN = "gaussian"
    POISSON = "poisson"
    BERNOULLI = "bernoulli"
    BINOMIAL = "binomial"


class LinkFunction(str, Enum):
    IDENTITY = "identity"
    LOG = "log"
    LOGIT = "logit"


class Transform(str, Enum):
    """Internal scale on which a hyperparameter is explored."""
    LOG = "log"
    FISHER_Z = "fisher_z"
    IDENTITY = "identity"


class ExplorationStrategy(str, Enum):
    AUTO = "auto"
    AXIS_GRID = "axis_grid"
    CCD_LITE = "ccd_lite"


class AggregationMode(str, Enum):
    MEAN = "mean"
    TOTAL = "total"


class ConsensusMode(str, Enum):
    MARGINAL = "marginal"
    MULTIVARIATE = "multivariate"


SUPPORTED_PAIRS = {
    (LikelihoodFamily.GAUSSIAN, LinkFunction.IDENTITY),
    (LikelihoodFamily.POISSON, LinkFunction.LOG),
    (LikelihoodFamily.BERNOULLI, LinkFunction.LOGIT),
    (LikelihoodFamily.BINOMIAL, LinkFunction.LOGIT),
}

# Roles each latent kind expects in its hyper bindings (or fixed params).
LATENT_ROLES = {
    LatentKind.IID: ("tau",),
    LatentKind.RW1: ("tau",),
    LatentKind.AR1: ("rho", "tau"),
    LatentKind.LATTICE_MATERN: ("range", "tau"),
    LatentKind.KRONECKER_AR1_LATTICE: ("rho", "range", "tau"),
    LatentKind.FIXED_EFFECT: (),
}
