#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 26, 2025 16:31:08$"

import logging
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.domain.model.approx import GaussianApprox, HyperGrid, PosteriorSummary
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.errors import ModelValidationError, NumericalError
from recinla.engine.domain.model.likelihood import ObservationBlock
from recinla.engine.domain.model.recursive import DriftDiagnostics, PointRecord, RecursiveState
from recinla.engine.infrastructure.config import DiagnosticsConfig
from recinla.engine.infrastructure.trace_logger import get_flagged_point_logger

logger = logging.getLogger(__name__)


class RecursiveEngine:
    """
    Recursive inference over data partitions.

    Support points are fixed by the fit on the first partition. Every later
    partition updates each point's latent Gaussian, using the previous
    posterior as prior, and adds the point's conditional log marginal
    likelihood to its accumulated log density.
    """

    def __init__(self, laplace: LaplaceEngine, diagnostics: DiagnosticsConfig = None):
        """
        Args:
            laplace: Engine used for the first fit and per-point updates
            diagnostics: Drift flag settings
        """
        self.laplace = laplace
        self.diagnostics = diagnostics or DiagnosticsConfig()

    def init_recursion(
        self,
        model: ModelAssembly,
        partition: Sequence[ObservationBlock],
        grid: HyperGrid = None,
    ) -> RecursiveState:
        """
        Fit the first partition and fix its support points.

        Args:
            model: Model structure; its own observation blocks are ignored
            partition: Observation blocks of the first partition
            grid: Optional fixed design instead of exploring

        Raises:
            ModelValidationError: If the first partition holds no observations
        """
        blocks = tuple(partition)
        if sum(b.size for b in blocks) == 0:
            raise ModelValidationError("the first partition must contain observations")
        result = self.laplace.fit(model.with_observations(blocks), grid)
        fitted = result.grid
        records = tuple(
            PointRecord(
                conditional_log_likelihood=float(value),
                iterations=a.iterations if a is not None else 0,
                converged=a.converged if a is not None else False,
                failed=a is None,
            )
            for value, a in zip(fitted.log_density, result.approxes)
        )
        failed = np.array([a is None for a in result.approxes], dtype=bool)
        state = RecursiveState(
            model=model,
            grid=fitted,
            priors=tuple(result.approxes),
            step=1,
            history=(fitted.log_density.copy(),),
            diagnostics=(),
            records=(records,),
            failed=failed,
            initial_mode_index=fitted.mode_index,
        )
        state = replace(state, diagnostics=(self.mode_shift_diagnostic(state),))
        logger.info(f"Recursion initialized with {fitted.size} support points")
        return state

    def _update_point(
        self,
        model: ModelAssembly,
        theta: np.ndarray,
        prior: Optional[GaussianApprox],
        index: int,
        step: int,
    ) -> tuple[float, Optional[GaussianApprox], PointRecord]:
        flagged = get_flagged_point_logger()
        if prior is None:
            return float("-inf"), None, PointRecord(float("-inf"), 0, False, failed=True)
        try:
            value, approx = self.laplace.conditional_log_evidence(model, theta, prior)
        except NumericalError as e:
            logger.warning(f"Support point {index} failed at step {step}: {e}")
            flagged.log_flagged_point(theta, "factorization_failed", step=step, index=index)
            return float("-inf"), prior, PointRecord(float("-inf"), 0, False, failed=True)
        if not approx.converged:
            # an unconverged mode gives no usable increment; the point leaves the mixture
            logger.warning(f"Support point {index} did not converge at step {step}, excluding it")
            flagged.log_flagged_point(theta, "non_converged", step=step, index=index)
            return float("-inf"), prior, PointRecord(float(value), approx.iterations, False, failed=True)
        return float(value), approx, PointRecord(float(value), approx.iterations, True)

    def step(self, state: RecursiveState, partition: Sequence[ObservationBlock]) -> RecursiveState:
        """
        Update every support point with one more partition.

        Returns:
            New state; the support points are those of the input state
        """
        blocks = tuple(partition)
        for block in blocks:
            if block.n_latent != state.model.latent_dim:
                raise ModelValidationError(
                    f"partition block '{block.name}' has {block.n_latent} columns, "
                    f"latent dim is {state.model.latent_dim}"
                )
        next_step = state.step + 1
        k = state.grid.size

        if sum(b.size for b in blocks) == 0:
            logger.info(f"Step {next_step}: empty partition")
            zero = np.zeros(k)
            records = tuple(PointRecord(0.0, 0, True) for _ in range(k))
            moved = replace(
                state,
                step=next_step,
                history=state.history + (zero,),
                records=state.records + (records,),
            )
            return replace(moved, diagnostics=state.diagnostics + (self.mode_shift_diagnostic(moved),))

        sub = state.model.with_observations(blocks)
        skipped = PointRecord(float("-inf"), 0, False, failed=True)
        outcomes = self.laplace.map_points(
            lambda i: (float("-inf"), state.priors[i], skipped) if state.failed[i]
            else self._update_point(sub, state.grid.points[i], state.priors[i], i, next_step),
            range(k),
        )
        increments = np.array([o[0] for o in outcomes], dtype=np.float64)
        priors = tuple(o[1] for o in outcomes)
        records = tuple(o[2] for o in outcomes)
        failed = state.failed | np.array([r.failed for r in records], dtype=bool)

        history = state.history + (increments,)
        accumulated = np.sum(np.vstack(history), axis=0)
        grid = replace(
            state.grid.with_log_density(accumulated),
            mode_index=int(np.argmax(accumulated)) if np.any(np.isfinite(accumulated)) else state.grid.mode_index,
        )
        moved = RecursiveState(
            model=state.model,
            grid=grid,
            priors=priors,
            step=next_step,
            history=history,
            diagnostics=state.diagnostics,
            records=state.records + (records,),
            failed=failed,
            initial_mode_index=state.initial_mode_index,
        )
        drift = self.mode_shift_diagnostic(moved)
        if drift.flagged:
            logger.warning(
                f"Step {next_step}: boundary mass {drift.boundary_mass_fraction:.3f} exceeds "
                f"{self.diagnostics.boundary_mass_threshold}, mode shift {drift.per_step_mode_shift:.3f}"
            )
            get_flagged_point_logger().log_drift(next_step, drift.per_step_mode_shift, drift.boundary_mass_fraction)
        logger.info(
            f"Step {next_step}: {int(np.sum([r.converged for r in records]))}/{k} points converged, "
            f"{int(np.sum(failed))} failed"
        )
        return replace(moved, diagnostics=state.diagnostics + (drift,))

    @staticmethod
    def _shell_mass(grid: HyperGrid, log_density: np.ndarray) -> float:
        weights = grid.with_log_density(log_density).normalized_weights()
        shell = grid.shell if grid.shell is not None else np.zeros(grid.size, dtype=bool)
        return float(min(max(np.sum(weights[shell]), 0.0), 1.0))

    def mode_shift_diagnostic(self, state: RecursiveState) -> DriftDiagnostics:
        """
        Distance from the initial mode point to the current argmax, in
        standardized units, and the posterior mass that moved onto the
        outermost shell.

        A design placed for the first partition already holds mass on its
        shell (every non-centre ccd point lies on the outer sphere), so the
        fraction is the shell mass gained over the first-partition density,
        rescaled to [0, 1]: 0 at the first step, 1 when all mass sits on
        the shell.
        """
        grid = state.grid
        if grid.size <= 1:
            return DriftDiagnostics(0.0, 0.0, 0, False)
        argmax = int(np.argmax(np.where(np.isfinite(state.accumulated), state.accumulated, -np.inf)))
        shift = float(np.linalg.norm(grid.z_points[argmax] - grid.z_points[state.initial_mode_index]))
        mass = self._shell_mass(grid, state.accumulated)
        reference = self._shell_mass(grid, state.history[0])
        gained = max(mass - reference, 0.0) / (1.0 - reference) if reference < 1.0 else 0.0
        return DriftDiagnostics(
            per_step_mode_shift=shift,
            boundary_mass_fraction=float(min(gained, 1.0)),
            argmax_index=argmax,
            flagged=gained > self.diagnostics.boundary_mass_threshold,
        )

    def finalize(self, state: RecursiveState) -> PosteriorSummary:
        """Marginals from the accumulated densities, the original Delta_k and the current posteriors."""
        grid = state.grid.with_log_density(state.accumulated)
        last = state.diagnostics[-1] if state.diagnostics else self.mode_shift_diagnostic(state)
        return self.laplace.summarize(
            grid,
            state.priors,
            method="recursive",
            metadata={
                "steps": state.step,
                "failed_points": int(np.sum(state.failed)),
                "mode_shift": last.per_step_mode_shift,
                "boundary_mass": last.boundary_mass_fraction,
                "drift_flagged": bool(any(d.flagged for d in state.diagnostics)),
            },
        )

    def run(self, model: ModelAssembly, partitions: Sequence[Sequence[ObservationBlock]]) -> RecursiveState:
        """init_recursion on the first partition, then one step per remaining partition."""
        partitions = list(partitions)
        if not partitions:
            raise ModelValidationError("no partitions given")
        state = self.init_recursion(model, partitions[0])
        for partition in partitions[1:]:
            state = self.step(state, partition)
        return state
