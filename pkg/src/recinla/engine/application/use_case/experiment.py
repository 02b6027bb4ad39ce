#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 29, 2025 10:18:36$"

import logging
import time
import tracemalloc
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import psutil

from recinla.engine.application.dto.dataset import Dataset
from recinla.engine.application.dto.experiment import EngineOptions, ExperimentConfig, ModelRecipe
from recinla.engine.application.dto.report import (
    CategoricalReplicate,
    ComparisonReport,
    DiscrepancySection,
    FusionReplicate,
    HyperSummary,
    MethodDifference,
    MethodSection,
    ReplicateStudy,
    ResourceUsage,
    TruthMetrics,
)
from recinla.engine.application.interface.solver import BaseCholeskySolver
from recinla.engine.application.interface.store import BaseResultStore
from recinla.engine.application.use_case.consensus import ConsensusEngine
from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.application.use_case.oracle import oracle_conjugate_gaussian
from recinla.engine.application.use_case.recipes import (
    PreparedModel,
    categorical_model,
    partition_observations,
    prepare_model,
    random_gaussian_model,
    spatial_fusion_model,
)
from recinla.engine.application.use_case.recursive import RecursiveEngine
from recinla.engine.application.use_case.simulation import simulate, simulate_categorical, simulate_spatial_fusion
from recinla.engine.domain.const.numeric import MAX_KRONECKER_DIM
from recinla.engine.domain.model.approx import LatentMarginals, PosteriorSummary
from recinla.engine.domain.model.errors import ModelValidationError, NumericalError
from recinla.engine.infrastructure.config import DiagnosticsConfig, EngineConfig

logger = logging.getLogger(__name__)

_Z95 = 1.959963984540054
_MB = 1024.0 * 1024.0


def truth_metrics(latent: LatentMarginals, prepared: PreparedModel) -> Optional[TruthMetrics]:
    """RMSE and 95% coverage of the posterior means of the truth block."""
    if prepared.truth_block is None or prepared.truth is None:
        return None
    block = prepared.model.block_slice(prepared.truth_block)
    mean, sd = latent.mean[block], latent.sd[block]
    err = mean - prepared.truth
    return TruthMetrics(
        block=prepared.truth_block,
        rmse=float(np.sqrt(np.mean(err * err))),
        coverage_95=float(np.mean(np.abs(err) <= _Z95 * sd)),
    )


def method_difference(method: str, summary: PosteriorSummary, reference: PosteriorSummary) -> MethodDifference:
    mean_diff = np.abs(summary.latent_marginals.mean - reference.latent_marginals.mean)
    sd_diff = np.abs(summary.latent_marginals.sd - reference.latent_marginals.sd)
    ref_sd = np.maximum(reference.latent_marginals.sd, np.finfo(float).tiny)
    relative = {}
    for marginal in reference.hyper_marginals:
        try:
            other = summary.hyper(marginal.name)
        except KeyError:
            continue
        relative[marginal.name] = float(
            abs(other.natural_mode - marginal.natural_mode) / max(abs(marginal.natural_mode), 1e-12)
        )
    return MethodDifference(
        method=method,
        reference=reference.method,
        max_abs_mean_diff=float(mean_diff.max()),
        max_abs_sd_diff=float(sd_diff.max()),
        max_mean_diff_in_sd=float((mean_diff / ref_sd).max()),
        hyper_mode_relative_diff=relative,
    )


def _hyper_summaries(summary: PosteriorSummary) -> list[HyperSummary]:
    return [
        HyperSummary(
            name=m.name,
            natural_mode=m.natural_mode,
            natural_mean=m.natural_mean,
            internal_mean=m.internal_mean,
            internal_sd=m.internal_sd,
            degenerate=m.degenerate,
        )
        for m in summary.hyper_marginals
    ]


class ExperimentRunner:
    def __init__(
        self,
        solver: BaseCholeskySolver,
        engine_settings: EngineConfig,
        diagnostics: DiagnosticsConfig,
        store: BaseResultStore,
        max_kronecker_dim: int = MAX_KRONECKER_DIM,
    ):
        """
        Initialize ExperimentRunner with injected dependencies.

        Args:
            solver: Sparse Cholesky service shared by all engines
            engine_settings: Base engine settings, overridden per experiment
            diagnostics: Recursive drift settings
            store: Result writer
            max_kronecker_dim: Size guard for Kronecker blocks
        """
        self.solver = solver
        self.engine_settings = engine_settings
        self.diagnostics = diagnostics
        self.store = store
        self.max_kronecker_dim = max_kronecker_dim

    def engines(self, options: EngineOptions = None) -> tuple[LaplaceEngine, RecursiveEngine, ConsensusEngine]:
        settings = (options or EngineOptions()).apply(self.engine_settings)
        laplace = LaplaceEngine(self.solver, settings, self.max_kronecker_dim)
        return laplace, RecursiveEngine(laplace, self.diagnostics), ConsensusEngine(laplace)

    def simulate(self, config: ExperimentConfig) -> Dataset:
        return simulate(config.simulation, config.seed, self.solver, self.max_kronecker_dim)

    @staticmethod
    def _measure(fn: Callable):
        """Run fn, returning its result with wall clock, traced peak and RSS growth."""
        process = psutil.Process()
        rss_before = process.memory_info().rss
        owns_trace = not tracemalloc.is_tracing()
        if owns_trace:
            tracemalloc.start()
        tracemalloc.reset_peak()
        start = time.perf_counter()
        try:
            result = fn()
        finally:
            elapsed = time.perf_counter() - start
            _, peak = tracemalloc.get_traced_memory()
            if owns_trace:
                tracemalloc.stop()
        usage = ResourceUsage(
            wall_clock_seconds=elapsed,
            peak_traced_mb=peak / _MB,
            rss_delta_mb=(process.memory_info().rss - rss_before) / _MB,
        )
        return result, usage

    def _section(self, method: str, summary: PosteriorSummary, n_points: int, prepared: PreparedModel,
                 usage: ResourceUsage) -> MethodSection:
        return MethodSection(
            method=method,
            log_marginal_likelihood=summary.log_marginal_likelihood,
            n_support_points=n_points,
            hyperparameters=_hyper_summaries(summary),
            truth=truth_metrics(summary.latent_marginals, prepared),
            resources=usage,
        )

    def run_experiment(self, config: ExperimentConfig, dataset: Dataset = None) -> ComparisonReport:
        """
        Simulate (unless a dataset is given), fit with every requested
        method and compare them.

        A method that fails is recorded under errors and its section stays
        empty; the remaining methods still run.
        """
        laplace, recursive, consensus = self.engines(config.engine)
        dataset = dataset if dataset is not None else self.simulate(config)
        prepared = prepare_model(dataset, config.recipe)
        partitions = partition_observations(dataset, prepared, config.partitions, config.seed)
        partitions = [p for p in partitions if p]
        logger.info(
            f"Experiment '{config.name}': {prepared.model.latent_dim} latent nodes, "
            f"{prepared.model.n_observations} observations, {len(partitions)} partitions"
        )

        report = ComparisonReport(
            name=config.name,
            seed=config.seed,
            dataset=dataset.kind,
            n_latent=prepared.model.latent_dim,
            n_observations=prepared.model.n_observations,
            n_partitions=len(partitions),
        )
        summaries: dict[str, PosteriorSummary] = {}
        full_result = None
        state = None

        for method in config.methods:
            try:
                if method == "full":
                    full_result, usage = self._measure(lambda: laplace.fit(prepared.model))
                    summary, n_points = full_result.summary, full_result.grid.size
                elif method == "recursive":
                    def run_recursive():
                        final = recursive.run(prepared.model, partitions)
                        return final, recursive.finalize(final)
                    (state, summary), usage = self._measure(run_recursive)
                    n_points = state.grid.size
                else:
                    summary, usage = self._measure(
                        lambda: consensus.sequential_consensus_fit(prepared.model, partitions, config.consensus_mode)
                    )
                    n_points = 1
            except (NumericalError, ModelValidationError) as e:
                logger.exception(f"Method '{method}' failed: {e}")
                report.errors[method] = f"{type(e).__name__}: {e}"
                continue
            summaries[method] = summary
            setattr(report, method, self._section(method, summary, n_points, prepared, usage))

        if "full" in summaries:
            if "recursive" in summaries:
                report.recursive_vs_full = method_difference("recursive", summaries["recursive"], summaries["full"])
            if "consensus" in summaries:
                report.consensus_vs_full = method_difference("consensus", summaries["consensus"], summaries["full"])
        if state is not None:
            try:
                report.discrepancy = self.discrepancy(laplace, prepared, state, summaries["recursive"])
            except NumericalError as e:
                logger.exception(f"Discrepancy refit failed: {e}")
                report.errors["discrepancy"] = f"{type(e).__name__}: {e}"

        if config.output_dir:
            self.write_outputs(Path(config.output_dir), dataset, report, summaries, state)
        return report

    @staticmethod
    def discrepancy(laplace: LaplaceEngine, prepared: PreparedModel, state, recursive_summary) -> DiscrepancySection:
        """
        Recursive against full-data log densities on the recursion's own
        support points, both centred at the initial mode point.
        """
        same = laplace.fit(prepared.model, grid=state.grid)
        k0 = state.initial_mode_index
        rec = state.accumulated
        full = same.grid.log_density
        per_point = (rec - rec[k0]) - (full - full[k0])
        finite = per_point[np.isfinite(per_point)]
        mean_diff = np.abs(recursive_summary.latent_marginals.mean - same.summary.latent_marginals.mean)
        return DiscrepancySection(
            mode_index=int(k0),
            per_point=[float(v) for v in per_point],
            max_abs=float(np.max(np.abs(finite))) if finite.size else float("nan"),
            max_abs_mean_diff_same_design=float(mean_diff.max()),
        )

    def write_outputs(self, out: Path, dataset: Dataset, report: ComparisonReport, summaries: dict, state) -> None:
        self.store.write_dataset(dataset, out / "dataset")
        for method, summary in summaries.items():
            self.store.write_summary(summary, out / method)
        if state is not None:
            self.store.write_trace(state, out / "recursive")
        self.store.write_report(report, out)
        logger.info(f"Results written to {out}")

    # ------------------------------------------------------------------
    # Replicate studies
    # ------------------------------------------------------------------

    def fusion_replicates(
        self,
        config: ExperimentConfig,
        n_replicates: int = 20,
        structures: Sequence[str] = ("S1", "S2"),
    ) -> list[FusionReplicate]:
        """Observations-only against joint fusion RMSE of the field, per region structure."""
        laplace, _, _ = self.engines(config.engine)
        rows = []
        for structure in structures:
            sim = config.simulation.spatial_fusion.model_copy(update={"structure": structure})
            for r in range(n_replicates):
                seed = config.seed + r
                dataset = simulate_spatial_fusion(sim, seed, self.solver)
                single = spatial_fusion_model(dataset, ModelRecipe(
                    joint=False, fixed_hyperparameters=config.recipe.fixed_hyperparameters,
                ))
                joint = spatial_fusion_model(dataset, config.recipe.model_copy(update={"joint": True}))
                single_metrics = truth_metrics(laplace.fit(single.model).summary.latent_marginals, single)
                joint_metrics = truth_metrics(laplace.fit(joint.model).summary.latent_marginals, joint)
                rows.append(FusionReplicate(
                    replicate=r,
                    seed=seed,
                    structure=structure,
                    rmse_observations_only=single_metrics.rmse,
                    rmse_joint=joint_metrics.rmse,
                    coverage_joint=joint_metrics.coverage_95,
                ))
                logger.info(
                    f"Fusion replicate {r} ({structure}): rmse {single_metrics.rmse:.4f} -> {joint_metrics.rmse:.4f}"
                )
        return rows

    def categorical_replicates(self, config: ExperimentConfig, n_replicates: int = 20) -> list[CategoricalReplicate]:
        """
        Posterior sds with source a alone against both sources, plus the
        u_a1 + u_a2 + u_a3 aggregate and the direct estimate from source b.
        """
        laplace, _, _ = self.engines(config.engine)
        sim = config.simulation.categorical
        first_group = list(sim.groups[0])
        rows = []
        for r in range(n_replicates):
            seed = config.seed + r
            dataset = simulate_categorical(sim, seed, self.solver)
            single = categorical_model(dataset, ModelRecipe(joint=False), sources=("a",))
            joint = categorical_model(dataset, ModelRecipe(joint=True))
            fit_single = laplace.fit(single.model)
            fit_joint = laplace.fit(joint.model)

            def sds(prepared: PreparedModel, summary: PosteriorSummary) -> dict[str, float]:
                u = prepared.model.block_slice("u_a")
                intercept = prepared.model.block_slice("intercept")
                sd = summary.latent_marginals.sd
                out = {f"u_a{k + 1}": float(sd[u][k]) for k in range(sim.n_fine) if k not in first_group}
                out["intercept"] = float(sd[intercept][0])
                return out

            vector = np.zeros(joint.model.latent_dim)
            vector[np.arange(joint.model.latent_dim)[joint.model.block_slice("u_a")][first_group]] = 1.0
            aggregate_mean, aggregate_sd = laplace.linear_combination(fit_joint.grid, fit_joint.approxes, vector)

            b_rows = dataset.source("b")
            intercept_mean = float(fit_joint.summary.latent_marginals.mean[joint.model.block_slice("intercept")][0])
            direct = float(b_rows[b_rows["level"] == 0]["response"].mean()) - intercept_mean
            rows.append(CategoricalReplicate(
                replicate=r,
                seed=seed,
                sd_single=sds(single, fit_single.summary),
                sd_joint=sds(joint, fit_joint.summary),
                aggregate_mean=aggregate_mean,
                aggregate_sd=aggregate_sd,
                direct_estimate=direct,
            ))
        return rows

    def replicate_study(self, config: ExperimentConfig, n_replicates: int = 20) -> ReplicateStudy:
        kind = config.simulation.kind
        if kind == "spatial_fusion":
            return ReplicateStudy(name=config.name, fusion=self.fusion_replicates(config, n_replicates))
        if kind == "categorical":
            return ReplicateStudy(name=config.name, categorical=self.categorical_replicates(config, n_replicates))
        raise ModelValidationError(f"no replicate study for '{kind}' simulations")

    def oracle_check(self, seed: int, constrained: bool = False) -> dict:
        """Engine against the closed-form posterior on a random gaussian model."""
        laplace, _, _ = self.engines()
        model, theta = random_gaussian_model(seed, constrained=constrained)
        oracle = oracle_conjugate_gaussian(model, theta)
        value, approx = laplace.conditional_log_evidence(model, theta)
        variances = laplace.constrained_variances(approx)
        result = {
            "seed": int(seed),
            "constrained": constrained,
            "max_abs_mean_diff": float(np.max(np.abs(approx.mode - oracle.mean))),
            "max_abs_variance_diff": float(np.max(np.abs(variances - np.diag(oracle.covariance)))),
            "log_evidence_diff": float(abs(value - oracle.log_evidence)),
        }
        logger.info(f"Oracle check: {result}")
        return result
