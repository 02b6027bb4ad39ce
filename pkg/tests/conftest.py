#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 30, 2025 11:02:44$"

import logging

import numpy as np
import pytest
import scipy.sparse as sp

from recinla.engine.application.use_case.consensus import ConsensusEngine
from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.application.use_case.recursive import RecursiveEngine
from recinla.engine.domain.const.model import LatentKind, LikelihoodFamily, Transform
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.hyper import HyperLayout, HyperParameter, NormalPrior
from recinla.engine.domain.model.latent import LatentBlockSpec
from recinla.engine.domain.model.likelihood import LikelihoodSpec, ObservationBlock
from recinla.engine.infrastructure.config import DiagnosticsConfig, EngineConfig
from recinla.engine.infrastructure.service.linalg.cholesky import SparseCholeskySolver


@pytest.fixture(autouse=True)
def _isolated_logs(tmp_path, monkeypatch):
    """Keep the flagged-point log out of the working tree."""
    monkeypatch.setenv("LOG_DIR", str(tmp_path / "logs"))


@pytest.fixture
def restore_root_logger():
    """setup_logging replaces the root handlers; put pytest's back afterwards."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)
    logging.captureWarnings(False)


@pytest.fixture
def solver() -> SparseCholeskySolver:
    return SparseCholeskySolver()


@pytest.fixture
def engine_settings() -> EngineConfig:
    return EngineConfig(strategy="auto", latent_grid_points=41, hyper_grid_points=41)


@pytest.fixture
def laplace(solver, engine_settings) -> LaplaceEngine:
    return LaplaceEngine(solver, engine_settings)


@pytest.fixture
def recursive(laplace) -> RecursiveEngine:
    return RecursiveEngine(laplace, DiagnosticsConfig(boundary_mass_threshold=0.2))


@pytest.fixture
def consensus(laplace) -> ConsensusEngine:
    return ConsensusEngine(laplace)


def iid_gaussian_model(seed: int = 0, n_groups: int = 6, per_group: int = 5) -> ModelAssembly:
    """Intercept plus iid group effects, gaussian observations, two free log precisions."""
    rng = np.random.default_rng(seed)
    groups = np.repeat(np.arange(n_groups), per_group)
    effects = rng.normal(0.0, 1.0, n_groups)
    y = 1.0 + effects[groups] + rng.normal(0.0, 0.5, groups.size)
    n = groups.size
    rows = np.concatenate([np.arange(n), np.arange(n)])
    cols = np.concatenate([np.zeros(n, dtype=np.int64), 1 + groups])
    design = sp.csr_matrix((np.ones(2 * n), (rows, cols)), shape=(n, 1 + n_groups))
    latent = (
        LatentBlockSpec(kind=LatentKind.FIXED_EFFECT, name="intercept", n=1, prior_precision=0.01),
        LatentBlockSpec(kind=LatentKind.IID, name="u", n=n_groups, hyper_bindings={"tau": "u_tau"}),
    )
    layout = HyperLayout((
        HyperParameter("u_tau", Transform.LOG, NormalPrior(0.0, 1.0)),
        HyperParameter("obs_precision", Transform.LOG, NormalPrior(1.0, 1.0)),
    ))
    block = ObservationBlock(
        values=y,
        predictor_rows=design,
        likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, hyper_bindings={"precision": "obs_precision"}),
    )
    return ModelAssembly(latent, (block,), layout)


def single_node_model(
    y,
    family: LikelihoodFamily = LikelihoodFamily.POISSON,
    free_tau: bool = True,
    tau: float = 1.0,
) -> ModelAssembly:
    """One latent node observed by every value; optionally one free prior log precision."""
    y = np.asarray(y, dtype=np.float64)
    design = sp.csr_matrix(np.ones((y.size, 1)))
    if free_tau:
        latent = (LatentBlockSpec(kind=LatentKind.IID, name="x", n=1, hyper_bindings={"tau": "x_tau"}),)
        layout = HyperLayout((HyperParameter("x_tau", Transform.LOG, NormalPrior(0.0, 1.0)),))
    else:
        latent = (LatentBlockSpec(kind=LatentKind.IID, name="x", n=1, fixed_params={"tau": tau}),)
        layout = HyperLayout(())
    block = ObservationBlock(values=y, predictor_rows=design, likelihood=LikelihoodSpec(family))
    return ModelAssembly(latent, (block,), layout)
