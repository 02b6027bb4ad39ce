#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 28, 2025 11:26:54$"

"""
Seeded simulators for the fusion, categorical and spatio-temporal studies.

Every simulator draws from independent child streams of one SeedSequence,
so a fixed seed reproduces the dataset exactly.
"""

import logging

import numpy as np
import pandas as pd

from recinla.engine.application.dto.dataset import OBSERVATION_COLUMNS, Dataset
from recinla.engine.application.dto.experiment import (
    CategoricalConfig,
    SimulationConfig,
    SpatialFusionConfig,
    SpatioTemporalConfig,
)
from recinla.engine.application.interface.solver import BaseCholeskySolver
from recinla.engine.application.use_case.fusion import build_categorical_operator
from recinla.engine.domain.const.numeric import MAX_KRONECKER_DIM
from recinla.engine.domain.gmrf import (
    build_kronecker_ar1_lattice_precision,
    build_lattice_matern_precision,
    expert_covariance,
)
from recinla.engine.domain.model.fusion import CategoricalGrouping

logger = logging.getLogger(__name__)


def _streams(seed: int, n: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(int(seed)).spawn(n)


def _int_seed(stream: np.random.SeedSequence) -> int:
    return int(stream.generate_state(1)[0])


def _rows(response, source: str, site=-1, time=-1, level=-1, region=-1, phi=1.0) -> pd.DataFrame:
    response = np.asarray(response, dtype=np.float64)
    n = response.size
    frame = pd.DataFrame({
        "response": response,
        "site": np.broadcast_to(np.asarray(site, dtype=np.int64), (n,)),
        "time": np.broadcast_to(np.asarray(time, dtype=np.int64), (n,)),
        "level": np.broadcast_to(np.asarray(level, dtype=np.int64), (n,)),
        "region": np.broadcast_to(np.asarray(region, dtype=np.int64), (n,)),
        "source": source,
        "phi": np.broadcast_to(np.asarray(phi, dtype=np.float64), (n,)),
    })
    return frame[list(OBSERVATION_COLUMNS)]


def _truth(component: str, values) -> pd.DataFrame:
    values = np.atleast_1d(np.asarray(values, dtype=np.float64))
    return pd.DataFrame({"component": component, "index": np.arange(values.size), "value": values})


def block_regions(nrow: int, ncol: int, blocks: int) -> list[tuple]:
    """Full cover of the lattice by blocks x blocks rectangles."""
    regions = []
    for rows in np.array_split(np.arange(nrow), blocks):
        for cols in np.array_split(np.arange(ncol), blocks):
            regions.append(tuple(int(r * ncol + c) for r in rows for c in cols))
    return regions


def _neighbours(cell: int, nrow: int, ncol: int) -> list[int]:
    r, c = divmod(cell, ncol)
    out = []
    if r > 0:
        out.append(cell - ncol)
    if r < nrow - 1:
        out.append(cell + ncol)
    if c > 0:
        out.append(cell - 1)
    if c < ncol - 1:
        out.append(cell + 1)
    return out


def patch_regions(nrow: int, ncol: int, n_patches: int, coverage: float, rng: np.random.Generator) -> list[tuple]:
    """
    Disjoint irregular patches grown cell by cell from random seeds until
    together they cover about `coverage` of the lattice.
    """
    n = nrow * ncol
    target = max(1, int(round(coverage * n / n_patches)))
    owner = np.full(n, -1)
    patches = []
    for p in range(n_patches):
        free = np.flatnonzero(owner < 0)
        if free.size == 0:
            break
        start = int(rng.choice(free))
        owner[start] = p
        members = [start]
        frontier = set(_neighbours(start, nrow, ncol))
        while len(members) < target:
            frontier = {c for c in frontier if owner[c] < 0}
            if not frontier:
                break
            cell = int(rng.choice(sorted(frontier)))
            owner[cell] = p
            members.append(cell)
            frontier.update(_neighbours(cell, nrow, ncol))
        patches.append(tuple(sorted(members)))
    return patches


def expert_noise(n_regions: int, n_experts: int, tau: float, rho: float, rng: np.random.Generator) -> np.ndarray:
    """n_regions x n_experts draws from MVN(0, Sigma), equal precisions, common correlation."""
    pairs = n_experts * (n_experts - 1) // 2
    sigma = expert_covariance(np.full(n_experts, tau), np.full(pairs, rho))
    return rng.multivariate_normal(np.zeros(n_experts), sigma, size=n_regions, method="cholesky")


def simulate_spatial_fusion(config: SpatialFusionConfig, seed: int, solver: BaseCholeskySolver) -> Dataset:
    """
    beta0 + u_s on the lattice, sparse gaussian point observations and
    expert values per region: bias + regional mean + correlated noise.
    """
    field_stream, points_stream, region_stream, expert_stream = _streams(seed, 4)
    n_cells = config.nrow * config.ncol
    q = build_lattice_matern_precision(config.nrow, config.ncol, config.range, config.tau_field)
    u = solver.sample(solver.cholesky(q), np.zeros(n_cells), _int_seed(field_stream))
    surface = config.beta0 + u

    rng = np.random.default_rng(points_stream)
    cells = np.sort(rng.choice(n_cells, size=config.n_points, replace=False))
    y_obs = surface[cells] + rng.normal(0.0, 1.0 / np.sqrt(config.tau_obs), cells.size)

    if config.structure == "S1":
        regions = block_regions(config.nrow, config.ncol, config.s1_blocks)
    else:
        regions = patch_regions(
            config.nrow, config.ncol, config.s2_patches, config.s2_coverage, np.random.default_rng(region_stream)
        )
    regional_mean = np.array([surface[list(r)].mean() for r in regions])
    noise = expert_noise(
        len(regions), config.n_experts, config.expert_tau, config.expert_rho, np.random.default_rng(expert_stream)
    )

    frames = [_rows(y_obs, "obs", site=cells)]
    region_index = np.arange(len(regions))
    for m in range(config.n_experts):
        values = config.expert_bias[m] + regional_mean + noise[:, m]
        frames.append(_rows(values, f"expert_{m + 1}", region=region_index))
    observations = pd.concat(frames, ignore_index=True)
    truth = pd.concat([
        _truth("field", u),
        _truth("intercept", config.beta0),
        _truth("regional_mean", regional_mean),
    ], ignore_index=True)
    logger.info(
        f"Simulated spatial fusion ({config.structure}): {config.n_points} points, "
        f"{len(regions)} regions x {config.n_experts} experts"
    )
    return Dataset(
        kind="spatial_fusion",
        observations=observations,
        truth=truth,
        meta={
            "nrow": config.nrow,
            "ncol": config.ncol,
            "n_sites": n_cells,
            "structure": config.structure,
            "regions": [list(r) for r in regions],
            "n_experts": config.n_experts,
            "sources": ["obs"] + [f"expert_{m + 1}" for m in range(config.n_experts)],
            "seed": int(seed),
        },
    )


def simulate_categorical(config: CategoricalConfig, seed: int, solver: BaseCholeskySolver = None) -> Dataset:
    """
    Source a observes beta0 + u_a per fine level, source b observes
    beta0 + u_b per coarse level with u_b the group totals of u_a.
    """
    effect_stream, a_stream, b_stream = _streams(seed, 3)
    u_a = np.random.default_rng(effect_stream).normal(0.0, 1.0 / np.sqrt(config.tau_u), config.n_fine)
    u_a = u_a - u_a.mean()
    grouping = CategoricalGrouping(tuple(range(config.n_fine)), tuple(tuple(g) for g in config.groups))
    u_b = build_categorical_operator(grouping).apply(u_a)

    levels_a = np.repeat(np.arange(config.n_fine), config.n_per_level_a)
    rng = np.random.default_rng(a_stream)
    y_a = config.beta0 + u_a[levels_a] + rng.normal(0.0, 1.0 / np.sqrt(config.tau_a), levels_a.size)
    levels_b = np.repeat(np.arange(u_b.size), config.n_per_level_b)
    rng = np.random.default_rng(b_stream)
    y_b = config.beta0 + u_b[levels_b] + rng.normal(0.0, 1.0 / np.sqrt(config.tau_b), levels_b.size)

    observations = pd.concat([_rows(y_a, "a", level=levels_a), _rows(y_b, "b", level=levels_b)], ignore_index=True)
    truth = pd.concat([
        _truth("u_a", u_a),
        _truth("u_b", u_b),
        _truth("intercept", config.beta0),
    ], ignore_index=True)
    return Dataset(
        kind="categorical",
        observations=observations,
        truth=truth,
        meta={
            "n_fine": config.n_fine,
            "groups": [list(g) for g in config.groups],
            "sources": ["a", "b"],
            "seed": int(seed),
        },
    )


def simulate_spatiotemporal(
    config: SpatioTemporalConfig,
    seed: int,
    solver: BaseCholeskySolver,
    max_kronecker_dim: int = MAX_KRONECKER_DIM,
) -> Dataset:
    """u_st from the AR1 x lattice Kronecker GMRF, observed at every (site, month)."""
    field_stream, noise_stream = _streams(seed, 2)
    n_sites = config.n_sites
    q = build_kronecker_ar1_lattice_precision(
        config.n_time, config.nrow, config.ncol, config.rho_t, config.range, config.tau_st, max_kronecker_dim
    )
    u = solver.sample(solver.cholesky(q), np.zeros(q.dim), _int_seed(field_stream))
    eta = config.beta0 + u

    rng = np.random.default_rng(noise_stream)
    if config.family == "gaussian":
        y = eta + rng.normal(0.0, 1.0 / np.sqrt(config.tau_obs), eta.size)
    else:
        y = rng.poisson(np.exp(eta)).astype(np.float64)
    nodes = np.arange(eta.size)
    times, sites = np.divmod(nodes, n_sites)
    observations = _rows(y, "obs", site=sites, time=times)
    truth = pd.concat([_truth("field", u), _truth("intercept", config.beta0)], ignore_index=True)
    logger.info(f"Simulated spatio-temporal field: {n_sites} sites x {config.n_time} time points ({config.family})")
    return Dataset(
        kind="spatiotemporal",
        observations=observations,
        truth=truth,
        meta={
            "nrow": config.nrow,
            "ncol": config.ncol,
            "n_sites": n_sites,
            "n_time": config.n_time,
            "family": config.family,
            "sources": ["obs"],
            "seed": int(seed),
        },
    )


def simulate(config: SimulationConfig, seed: int, solver: BaseCholeskySolver, max_kronecker_dim: int = MAX_KRONECKER_DIM) -> Dataset:
    if config.kind == "spatial_fusion":
        return simulate_spatial_fusion(config.spatial_fusion, seed, solver)
    if config.kind == "categorical":
        return simulate_categorical(config.categorical, seed, solver)
    return simulate_spatiotemporal(config.spatiotemporal, seed, solver, max_kronecker_dim)
