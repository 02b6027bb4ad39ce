#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 28, 2025 14:05:31$"

import logging
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from recinla.engine.application.dto.dataset import Dataset
from recinla.engine.application.dto.experiment import ModelRecipe, PartitionRule
from recinla.engine.application.use_case.fusion import (
    assemble_joint_model,
    build_areal_operator,
    build_categorical_operator,
)
from recinla.engine.domain.const.model import LatentKind, LikelihoodFamily, Transform
from recinla.engine.domain.const.numeric import EXPERT_OBSERVATION_LOG_PRECISION
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.fusion import CategoricalGrouping, ExpertSpec, Region, SharedPredictorSpec
from recinla.engine.domain.model.hyper import HyperLayout, HyperParameter, NormalPrior, to_internal
from recinla.engine.domain.model.latent import LatentBlockSpec, LinearConstraint
from recinla.engine.domain.model.likelihood import LikelihoodSpec, ObservationBlock

logger = logging.getLogger(__name__)

_VAGUE_LOG_PRECISION = NormalPrior(0.0, 3.0)


@dataclass(frozen=True)
class PreparedModel:
    """A model built from a dataset, with the dataset rows behind each observation block."""
    model: ModelAssembly
    block_rows: tuple
    truth_block: Optional[str] = None
    truth: Optional[np.ndarray] = None


def _intercept_design(columns: np.ndarray, n_cols: int) -> sp.csr_matrix:
    """Rows with a one in column 0 (intercept) and one in the given column."""
    n = columns.size
    rows = np.concatenate([np.arange(n), np.arange(n)])
    cols = np.concatenate([np.zeros(n, dtype=np.int64), columns])
    return sp.csr_matrix((np.ones(2 * n), (rows, cols)), shape=(n, n_cols))


def apply_fixed(params: Sequence[HyperParameter], fixed: Mapping[str, float]) -> HyperLayout:
    """Hold the named hyperparameters at natural-scale values."""
    names = {p.name for p in params}
    unknown = sorted(set(fixed) - names)
    if unknown:
        raise ModelValidationError(f"cannot fix unknown hyperparameters {unknown}")
    return HyperLayout(tuple(
        replace(p, initial=float(to_internal(p.transform, fixed[p.name])), fixed=True) if p.name in fixed else p
        for p in params
    ))


def _fix_layout(model: ModelAssembly, fixed: Mapping[str, float]) -> ModelAssembly:
    if not fixed:
        return model
    return model.with_layout(apply_fixed(model.hyper_layout.parameters, fixed))


def spatial_fusion_model(dataset: Dataset, recipe: ModelRecipe) -> PreparedModel:
    """
    beta0 + u_s seen by point observations; with recipe.joint each expert
    also sees the regional mean of beta0 + u_s plus its own bias, with
    correlated errors between experts.
    """
    meta = dataset.meta
    nrow, ncol = meta["nrow"], meta["ncol"]
    n_cells = nrow * ncol
    n_primary = 1 + n_cells
    obs = dataset.source("obs")
    params = [
        HyperParameter(
            "field_range", Transform.LOG, NormalPrior(float(np.log(max(nrow, ncol) / 4.0)), 1.0),
            initial=float(np.log(max(nrow, ncol) / 4.0)),
        ),
        HyperParameter("field_tau", Transform.LOG, _VAGUE_LOG_PRECISION),
        HyperParameter("obs_precision", Transform.LOG, _VAGUE_LOG_PRECISION),
    ]
    latent = (
        LatentBlockSpec(kind=LatentKind.FIXED_EFFECT, name="intercept", n=1),
        LatentBlockSpec(
            kind=LatentKind.LATTICE_MATERN, name="field", nrow=nrow, ncol=ncol,
            hyper_bindings={"range": "field_range", "tau": "field_tau"},
        ),
    )
    block = ObservationBlock(
        values=obs["response"].to_numpy(),
        predictor_rows=_intercept_design(1 + obs["site"].to_numpy(), n_primary),
        likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, hyper_bindings={"precision": "obs_precision"}),
        name="obs",
    )
    primary = ModelAssembly(latent, (block,), HyperLayout(tuple(params)))
    block_rows = [obs.index.to_numpy()]

    if recipe.joint:
        n_experts = int(meta["n_experts"])
        regions = [Region(id=j, member_points=tuple(m), measure=float(len(m))) for j, m in enumerate(meta["regions"])]
        operator = build_areal_operator(n_cells, regions)
        experts = dataset.observations[dataset.observations["source"].str.startswith("expert_")]
        source_index = experts["source"].str.slice(len("expert_")).astype(int).to_numpy() - 1
        region_index = experts["region"].to_numpy()
        tau_bindings = tuple(f"expert_tau_{m + 1}" for m in range(n_experts))
        rho_bindings = tuple(
            f"expert_rho_{i + 1}_{j + 1}" for i in range(n_experts) for j in range(i + 1, n_experts)
        )
        spec = SharedPredictorSpec(
            field_design=sp.hstack([sp.csr_matrix(np.ones((n_cells, 1))), sp.identity(n_cells)], format="csr"),
            entry_index=region_index,
            expert=ExpertSpec(
                n_sources=n_experts,
                source_index=source_index,
                replicate_index=region_index,
                n_replicates=len(regions),
                tau_bindings=tau_bindings,
                rho_bindings=rho_bindings,
            ),
            intercept_name="expert_intercept",
            intercept_index=source_index,
            priors={name: _VAGUE_LOG_PRECISION for name in tau_bindings},
            name="experts",
        )
        expert_block = ObservationBlock(
            values=experts["response"].to_numpy(),
            predictor_rows=sp.csr_matrix((len(experts), n_primary)),
            likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, fixed_log_precision=EXPERT_OBSERVATION_LOG_PRECISION),
            name="experts",
        )
        primary = assemble_joint_model(primary, [(expert_block, operator, spec)])
        block_rows.append(experts.index.to_numpy())

    return PreparedModel(
        model=_fix_layout(primary, recipe.fixed_hyperparameters),
        block_rows=tuple(block_rows),
        truth_block="field",
        truth=dataset.truth_vector("field"),
    )


def categorical_model(dataset: Dataset, recipe: ModelRecipe, sources: Sequence[str] = ("a", "b")) -> PreparedModel:
    """
    Intercept plus sum-to-zero u_a. Source a reads beta0 + u_a directly;
    source b reads beta0 + (group totals of u_a) when joint.
    """
    n_fine = int(dataset.meta["n_fine"])
    n_primary = 1 + n_fine
    latent = (
        LatentBlockSpec(kind=LatentKind.FIXED_EFFECT, name="intercept", n=1),
        LatentBlockSpec(
            kind=LatentKind.IID, name="u_a", n=n_fine, hyper_bindings={"tau": "u_tau"},
            constraints=(LinearConstraint.sum_to_zero(n_fine),),
        ),
    )
    params = [HyperParameter("u_tau", Transform.LOG, _VAGUE_LOG_PRECISION)]
    blocks, block_rows = [], []
    if "a" in sources:
        params.append(HyperParameter("precision_a", Transform.LOG, _VAGUE_LOG_PRECISION))
        rows_a = dataset.source("a")
        blocks.append(ObservationBlock(
            values=rows_a["response"].to_numpy(),
            predictor_rows=_intercept_design(1 + rows_a["level"].to_numpy(), n_primary),
            likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, hyper_bindings={"precision": "precision_a"}),
            name="a",
        ))
        block_rows.append(rows_a.index.to_numpy())
    model = ModelAssembly(latent, tuple(blocks), HyperLayout(tuple(params)))

    if recipe.joint and "b" in sources:
        rows_b = dataset.source("b")
        grouping = CategoricalGrouping(tuple(range(n_fine)), tuple(tuple(g) for g in dataset.meta["groups"]))
        operator = build_categorical_operator(grouping)
        n_coarse = operator.shape[0]
        direct = sp.csr_matrix((np.ones(n_coarse), (np.arange(n_coarse), np.zeros(n_coarse, dtype=np.int64))),
                               shape=(n_coarse, n_primary))
        spec = SharedPredictorSpec(
            field_design=sp.hstack([sp.csr_matrix((n_fine, 1)), sp.identity(n_fine)], format="csr"),
            entry_index=rows_b["level"].to_numpy(),
            direct_design=direct,
            priors={"precision_b": _VAGUE_LOG_PRECISION},
            name="b",
        )
        block_b = ObservationBlock(
            values=rows_b["response"].to_numpy(),
            predictor_rows=sp.csr_matrix((len(rows_b), n_primary)),
            likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, hyper_bindings={"precision": "precision_b"}),
            name="b",
        )
        model = assemble_joint_model(model, [(block_b, operator, spec)])
        block_rows.append(rows_b.index.to_numpy())

    return PreparedModel(
        model=_fix_layout(model, recipe.fixed_hyperparameters),
        block_rows=tuple(block_rows),
        truth_block="u_a",
        truth=dataset.truth_vector("u_a"),
    )


def spatiotemporal_model(dataset: Dataset, recipe: ModelRecipe) -> PreparedModel:
    """beta0 + u_st with the AR1 x lattice Kronecker field; gaussian or poisson observations."""
    meta = dataset.meta
    nrow, ncol, n_time, n_sites = meta["nrow"], meta["ncol"], meta["n_time"], meta["n_sites"]
    n_primary = 1 + n_time * n_sites
    obs = dataset.source("obs")
    family = LikelihoodFamily(meta.get("family", "gaussian"))
    params = [
        HyperParameter("field_rho", Transform.FISHER_Z, NormalPrior(0.0, 1.0)),
        HyperParameter(
            "field_range", Transform.LOG, NormalPrior(float(np.log(max(nrow, ncol) / 3.0)), 1.0),
            initial=float(np.log(max(nrow, ncol) / 3.0)),
        ),
        HyperParameter("field_tau", Transform.LOG, _VAGUE_LOG_PRECISION),
    ]
    bindings = {}
    if family == LikelihoodFamily.GAUSSIAN:
        params.append(HyperParameter("obs_precision", Transform.LOG, _VAGUE_LOG_PRECISION))
        bindings = {"precision": "obs_precision"}
    latent = (
        LatentBlockSpec(kind=LatentKind.FIXED_EFFECT, name="intercept", n=1),
        LatentBlockSpec(
            kind=LatentKind.KRONECKER_AR1_LATTICE, name="field", n_time=n_time, nrow=nrow, ncol=ncol,
            hyper_bindings={"rho": "field_rho", "range": "field_range", "tau": "field_tau"},
        ),
    )
    nodes = obs["time"].to_numpy() * n_sites + obs["site"].to_numpy()
    block = ObservationBlock(
        values=obs["response"].to_numpy(),
        predictor_rows=_intercept_design(1 + nodes, n_primary),
        likelihood=LikelihoodSpec(family, hyper_bindings=bindings),
        name="obs",
    )
    model = ModelAssembly(latent, (block,), HyperLayout(tuple(params)))
    return PreparedModel(
        model=_fix_layout(model, recipe.fixed_hyperparameters),
        block_rows=(obs.index.to_numpy(),),
        truth_block="field",
        truth=dataset.truth_vector("field"),
    )


def prepare_model(dataset: Dataset, recipe: ModelRecipe) -> PreparedModel:
    if dataset.kind == "spatial_fusion":
        return spatial_fusion_model(dataset, recipe)
    if dataset.kind == "categorical":
        return categorical_model(dataset, recipe)
    if dataset.kind == "spatiotemporal":
        return spatiotemporal_model(dataset, recipe)
    raise ModelValidationError(f"no model recipe for dataset kind '{dataset.kind}'")


def partition_labels(dataset: Dataset, prepared: PreparedModel, rule: PartitionRule, seed: int) -> np.ndarray:
    """Partition number of every dataset row used by the model, -1 elsewhere."""
    labels = np.full(len(dataset.observations), -1, dtype=np.int64)
    used = np.concatenate(prepared.block_rows) if prepared.block_rows else np.zeros(0, dtype=np.int64)
    if rule.kind == "time_block":
        times = dataset.observations["time"].to_numpy()[used]
        if np.any(times < 0):
            raise ModelValidationError("time_block partitioning needs a time index on every observation")
        labels[used] = times // rule.size
        return labels
    order = used if rule.kind == "row_range" else np.random.default_rng(int(seed)).permutation(used)
    if rule.count > max(order.size, 1):
        raise ModelValidationError(f"cannot split {order.size} observations into {rule.count} partitions")
    for j, chunk in enumerate(np.array_split(order, rule.count)):
        labels[chunk] = j
    return labels


def partition_observations(
    dataset: Dataset,
    prepared: PreparedModel,
    rule: PartitionRule,
    seed: int,
) -> list[tuple]:
    """
    Observation blocks of the prepared model split by the rule.

    Each partition is a tuple of non-empty ObservationBlock subsets; a
    partition without rows is an empty tuple.
    """
    labels = partition_labels(dataset, prepared, rule, seed)
    n_parts = int(labels.max()) + 1 if np.any(labels >= 0) else 0
    partitions = []
    for j in range(n_parts):
        blocks = []
        for block, rows in zip(prepared.model.observation_blocks, prepared.block_rows):
            local = np.flatnonzero(labels[rows] == j)
            if local.size:
                blocks.append(block.subset(local))
        partitions.append(tuple(blocks))
    logger.info(f"Partitioned observations into {n_parts} parts by {rule.kind}")
    return partitions


def random_gaussian_model(seed: int, n_obs: int = 30, constrained: bool = False) -> tuple[ModelAssembly, np.ndarray]:
    """
    20-node gaussian model (2 fixed effects, 8 iid, 10 ar1) with a random
    sparse design; returns the model and a random theta.
    """
    rng = np.random.default_rng(int(seed))
    constraints = (LinearConstraint.sum_to_zero(8),) if constrained else ()
    latent = (
        LatentBlockSpec(kind=LatentKind.FIXED_EFFECT, name="beta", n=2, prior_precision=0.1),
        LatentBlockSpec(kind=LatentKind.IID, name="iid", n=8, hyper_bindings={"tau": "iid_tau"},
                        constraints=constraints),
        LatentBlockSpec(kind=LatentKind.AR1, name="ar1", n=10, hyper_bindings={"rho": "ar1_rho", "tau": "ar1_tau"}),
    )
    design = sp.random(n_obs, 20, density=0.25, random_state=rng, data_rvs=rng.standard_normal, format="lil")
    design[np.arange(n_obs), rng.integers(0, 20, n_obs)] = 1.0
    block = ObservationBlock(
        values=rng.normal(0.0, 2.0, n_obs),
        predictor_rows=sp.csr_matrix(design),
        likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, hyper_bindings={"precision": "obs_precision"}),
    )
    layout = HyperLayout((
        HyperParameter("iid_tau", Transform.LOG),
        HyperParameter("ar1_rho", Transform.FISHER_Z),
        HyperParameter("ar1_tau", Transform.LOG),
        HyperParameter("obs_precision", Transform.LOG),
    ))
    theta = np.array([rng.normal(0.0, 0.5), rng.uniform(-1.0, 1.0), rng.normal(0.0, 0.5), rng.normal(0.5, 0.5)])
    return ModelAssembly(latent, (block,), layout), theta
