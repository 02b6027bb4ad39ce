#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 27, 2025 13:22:50$"

"""
Change-of-support operators and joint-model assembly.

Operators map fine-scale latent nodes (lattice cells, time points,
space-time voxels or categorical levels) to coarse predictor entries.
"""

import logging
from dataclasses import replace
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

from recinla.engine.domain.const.model import AggregationMode, LatentKind, Transform
from recinla.engine.domain.const.numeric import ALPHA_PRIOR_MEAN, ALPHA_PRIOR_SD, MEASURE_TOLERANCE
from recinla.engine.domain.gmrf import dense_precision, expert_covariance
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.fusion import (
    AggregationOperator,
    CategoricalGrouping,
    Region,
    SharedPredictorSpec,
)
from recinla.engine.domain.model.hyper import HyperParameter, LogGammaPrior, NormalPrior
from recinla.engine.domain.model.latent import LatentBlockSpec
from recinla.engine.domain.model.likelihood import ObservationBlock

logger = logging.getLogger(__name__)


def _site_count(sites: Union[int, Sequence]) -> int:
    return int(sites) if np.isscalar(sites) else len(sites)


def _membership_operator(
    n_cols: int,
    members: Sequence[Sequence[int]],
    mode: AggregationMode,
    provenance: str,
    row_ids: tuple,
) -> AggregationOperator:
    mode = AggregationMode(mode)
    rows, cols, vals = [], [], []
    for r, group in enumerate(members):
        group = np.unique(np.asarray(group, dtype=np.int64))
        if group.size == 0:
            raise ModelValidationError(f"{provenance} region {row_ids[r]!r} has no member points")
        if group.min() < 0 or group.max() >= n_cols:
            raise ModelValidationError(f"{provenance} region {row_ids[r]!r} references sites outside [0, {n_cols})")
        weight = 1.0 / group.size if mode == AggregationMode.MEAN else 1.0
        rows.extend([r] * group.size)
        cols.extend(group.tolist())
        vals.extend([weight] * group.size)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(members), n_cols))
    return AggregationOperator(matrix=matrix, mode=mode, provenance=provenance, row_ids=tuple(row_ids))


def build_areal_operator(
    sites: Union[int, Sequence],
    regions: Sequence[Region],
    mode: AggregationMode = AggregationMode.MEAN,
) -> AggregationOperator:
    """Mean or total of lattice cells whose centres fall in each region."""
    return _membership_operator(
        _site_count(sites), [r.member_points for r in regions], mode, "areal", tuple(r.id for r in regions)
    )


def build_interval_operator(
    timeline: Sequence[float],
    intervals: Sequence[tuple],
    mode: AggregationMode = AggregationMode.MEAN,
) -> AggregationOperator:
    """
    Rows over the time points lying in [t1, t2]; intervals may overlap,
    be irregular or cover only part of the timeline.
    """
    times = np.asarray(timeline, dtype=np.float64)
    members = []
    for t1, t2 in intervals:
        if not t1 < t2:
            raise ModelValidationError(f"interval ({t1}, {t2}) needs t1 < t2")
        inside = np.where((times >= t1) & (times <= t2))[0]
        if inside.size == 0:
            raise ModelValidationError(f"interval ({t1}, {t2}) contains no time points")
        members.append(inside)
    return _membership_operator(times.size, members, mode, "interval", tuple(tuple(i) for i in intervals))


def voxel_members(cells: Sequence[int], times: Sequence[int], n_space: int) -> tuple:
    """Space-time site indices t * n_space + cell, matching time-major latent order."""
    return tuple(int(t) * n_space + int(c) for t in times for c in cells)


def build_voxel_operator(
    n_space: int,
    n_time: int,
    voxels: Sequence[Region],
    mode: AggregationMode = AggregationMode.MEAN,
) -> AggregationOperator:
    """Areal aggregation over space-time sites (cell x time node)."""
    return _membership_operator(
        n_space * n_time, [v.member_points for v in voxels], mode, "voxel", tuple(v.id for v in voxels)
    )


def build_categorical_operator(grouping: CategoricalGrouping) -> AggregationOperator:
    """
    Row per group over the fine levels.

    Balanced groupings sum their members with weight 1; weighted groupings
    must carry non-negative weights summing to 1 per group.
    """
    n_levels = len(grouping.fine_levels)
    rows, cols, vals = [], [], []
    for k, group in enumerate(grouping.groups):
        if grouping.weights is None:
            weights = np.ones(len(group))
        else:
            weights = grouping.weights[k]
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > MEASURE_TOLERANCE:
                raise ModelValidationError(f"weights of group {k} must be non-negative and sum to 1")
        rows.extend([k] * len(group))
        cols.extend(group)
        vals.extend(weights.tolist())
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(grouping.groups), n_levels))
    mode = AggregationMode.TOTAL if grouping.weights is None else AggregationMode.MEAN
    return AggregationOperator(
        matrix=matrix,
        mode=mode,
        provenance="categorical",
        row_ids=tuple(range(len(grouping.groups))),
    )


def nested_areal_weights(
    fine_regions: Sequence[Region],
    coarse_regions: Sequence[Region],
    containment: Sequence[int],
) -> AggregationOperator:
    """
    Coarse predictors as measure-weighted averages of nested fine ones.

    Args:
        fine_regions: B_k with their measures
        coarse_regions: C_j with their measures
        containment: containment[k] is the index of the coarse region holding B_k

    Raises:
        ModelValidationError: If assignments are invalid or the fine measures
            do not add up to the coarse measure
    """
    containment = np.asarray(containment, dtype=np.int64)
    if containment.size != len(fine_regions):
        raise ModelValidationError("every fine region needs exactly one coarse region")
    if containment.size and (containment.min() < 0 or containment.max() >= len(coarse_regions)):
        raise ModelValidationError("containment references an unknown coarse region")
    measures = np.array([r.measure for r in fine_regions], dtype=np.float64)
    rows, cols, vals = [], [], []
    for j, coarse in enumerate(coarse_regions):
        inside = np.where(containment == j)[0]
        if inside.size == 0:
            raise ModelValidationError(f"coarse region {coarse.id!r} contains no fine regions")
        total = measures[inside].sum()
        if abs(total - coarse.measure) > MEASURE_TOLERANCE * max(1.0, coarse.measure):
            raise ModelValidationError(
                f"coarse region {coarse.id!r} has measure {coarse.measure} but its parts sum to {total}"
            )
        rows.extend([j] * inside.size)
        cols.extend(inside.tolist())
        vals.extend((measures[inside] / coarse.measure).tolist())
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(coarse_regions), len(fine_regions)))
    return AggregationOperator(
        matrix=matrix,
        mode=AggregationMode.MEAN,
        provenance="nested",
        row_ids=tuple(c.id for c in coarse_regions),
    )


def build_expert_covariance(taus: Sequence[float], rhos) -> np.ndarray:
    """Precision of Sigma_B with Sigma_ii = 1 / tau_i and Sigma_ij = rho_ij / sqrt(tau_i tau_j)."""
    return dense_precision(expert_covariance(taus, rhos))


def _pad(matrix: sp.spmatrix, n_cols: int) -> sp.csr_matrix:
    matrix = sp.csr_matrix(matrix)
    extra = n_cols - matrix.shape[1]
    if extra == 0:
        return matrix
    return sp.csr_matrix(sp.hstack([matrix, sp.csr_matrix((matrix.shape[0], extra))]))


def _columns(n_rows: int, n_cols: int, segments: Sequence[tuple]) -> sp.csr_matrix:
    """Place (start column, matrix) segments side by side, zeros elsewhere."""
    parts, position = [], 0
    for start, matrix in sorted(segments, key=lambda s: s[0]):
        if start > position:
            parts.append(sp.csr_matrix((n_rows, start - position)))
        parts.append(sp.csr_matrix(matrix))
        position = start + matrix.shape[1]
    if position < n_cols:
        parts.append(sp.csr_matrix((n_rows, n_cols - position)))
    return sp.csr_matrix(sp.hstack(parts))


def _selector(rows: np.ndarray, n_cols: int) -> sp.csr_matrix:
    n = rows.size
    return sp.csr_matrix((np.ones(n), (np.arange(n), rows)), shape=(n, n_cols))


def _hyper(name: str, transform: Transform, default_prior, spec: SharedPredictorSpec, initial: float = 0.0):
    return HyperParameter(
        name=name,
        transform=transform,
        prior=spec.priors.get(name, default_prior),
        initial=float(spec.initial.get(name, initial)),
    )


def assemble_joint_model(
    primary: ModelAssembly,
    secondary_blocks: Sequence[tuple],
) -> ModelAssembly:
    """
    Extend the primary model with secondary sources seen through
    aggregation operators.

    Each entry is (ObservationBlock, AggregationOperator, SharedPredictorSpec).
    The shared rows of observation r are row entry_index[r] of
    Operator @ field_design + direct_design, multiplied by alpha. Residual,
    expert and intercept terms are appended to the latent field; the
    block's own predictor_rows (over the primary nodes) are added unscaled.

    Raises:
        ModelValidationError: On dimension mismatches or unknown bindings
    """
    n_primary = primary.latent_dim
    latent_blocks = list(primary.latent_blocks)
    extra_params: list[HyperParameter] = []
    pieces = []
    offset = n_primary

    for block, operator, spec in secondary_blocks:
        n_obs = block.size
        n_coarse = operator.shape[0]
        if operator.shape[1] != spec.field_design.shape[0]:
            raise ModelValidationError(
                f"operator has {operator.shape[1]} columns, field design has {spec.field_design.shape[0]} rows"
            )
        if spec.field_design.shape[1] != n_primary:
            raise ModelValidationError(
                f"field design has {spec.field_design.shape[1]} columns, primary latent dim is {n_primary}"
            )
        if spec.entry_index.size != n_obs or (n_obs and (spec.entry_index.min() < 0 or spec.entry_index.max() >= n_coarse)):
            raise ModelValidationError(f"entry index of '{spec.name}' must map each observation to a coarse entry")
        if block.n_latent != n_primary:
            raise ModelValidationError(f"block '{block.name}' predictor rows must span the {n_primary} primary nodes")

        coarse = operator.matrix @ spec.field_design
        if spec.direct_design is not None:
            if spec.direct_design.shape != (n_coarse, n_primary):
                raise ModelValidationError(f"direct design of '{spec.name}' must be {n_coarse} x {n_primary}")
            coarse = coarse + spec.direct_design
        shared = sp.csr_matrix(coarse)[spec.entry_index]

        own = []
        if spec.residual_binding is not None:
            name = f"{spec.name}_residual"
            latent_blocks.append(LatentBlockSpec(
                kind=LatentKind.IID, name=name, n=n_coarse, hyper_bindings={"tau": spec.residual_binding},
            ))
            extra_params.append(_hyper(spec.residual_binding, Transform.LOG, LogGammaPrior(), spec))
            own.append((offset, _selector(spec.entry_index, n_coarse)))
            offset += n_coarse

        if spec.expert is not None:
            expert = spec.expert
            if expert.source_index.size != n_obs or expert.replicate_index.size != n_obs:
                raise ModelValidationError(f"expert indices of '{spec.name}' must align with the observations")
            bindings = {f"tau_{i + 1}": b for i, b in enumerate(expert.tau_bindings)}
            pairs = [(i, j) for i in range(expert.n_sources) for j in range(i + 1, expert.n_sources)]
            bindings.update({f"rho_{i + 1}_{j + 1}": b for (i, j), b in zip(pairs, expert.rho_bindings)})
            latent_blocks.append(LatentBlockSpec(
                kind=LatentKind.MVN_DENSE,
                name=f"{spec.name}_expert",
                n_sources=expert.n_sources,
                n_replicates=expert.n_replicates,
                hyper_bindings=bindings,
            ))
            extra_params.extend(_hyper(b, Transform.LOG, LogGammaPrior(), spec) for b in expert.tau_bindings)
            extra_params.extend(_hyper(b, Transform.FISHER_Z, NormalPrior(0.0, 1.0), spec) for b in expert.rho_bindings)
            size = expert.n_sources * expert.n_replicates
            own.append((offset, _selector(expert.replicate_index * expert.n_sources + expert.source_index, size)))
            offset += size

        if spec.intercept_name is not None:
            index = spec.intercept_index if spec.intercept_index is not None else np.zeros(n_obs, dtype=np.int64)
            size = int(index.max()) + 1 if index.size else 1
            latent_blocks.append(LatentBlockSpec(kind=LatentKind.FIXED_EFFECT, name=spec.intercept_name, n=size))
            own.append((offset, _selector(index, size)))
            offset += size

        binding = block.likelihood.precision_binding
        if binding is not None:
            extra_params.append(_hyper(binding, Transform.LOG, NormalPrior(0.0, 1.0), spec))
        if spec.alpha_binding is not None:
            extra_params.append(
                _hyper(spec.alpha_binding, Transform.IDENTITY, NormalPrior(ALPHA_PRIOR_MEAN, ALPHA_PRIOR_SD), spec, 1.0)
            )
        pieces.append((block, shared, own, spec))

    n_total = offset
    layout = primary.hyper_layout.merged(extra_params)
    observation_blocks = [
        replace(b, predictor_rows=_pad(b.predictor_rows, n_total),
                scaled_rows=None if b.scaled_rows is None else _pad(b.scaled_rows, n_total))
        for b in primary.observation_blocks
    ]
    for block, shared, own, spec in pieces:
        base = _columns(block.size, n_total, [(0, block.predictor_rows)] + own)
        shared = _pad(shared, n_total)
        if spec.alpha_binding is not None:
            observation_blocks.append(replace(
                block, predictor_rows=base, scaled_rows=shared, scale_binding=spec.alpha_binding, name=spec.name,
            ))
        else:
            observation_blocks.append(replace(
                block, predictor_rows=sp.csr_matrix(base + spec.alpha_value * shared), name=spec.name,
            ))
    logger.info(
        f"Joint model: {len(latent_blocks)} latent blocks, {n_total} latent nodes, "
        f"{len(observation_blocks)} observation blocks"
    )
    return ModelAssembly(tuple(latent_blocks), tuple(observation_blocks), layout)
