#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 26, 2025 09:14:22$"

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from recinla.engine.application.interface.solver import BaseCholeskySolver
from recinla.engine.application.use_case.exploration import axis_grid, ccd_design, standardization
from recinla.engine.application.use_case.marginals import hyper_marginals, log_evidence, mixture_marginals
from recinla.engine.domain.const.model import ExplorationStrategy
from recinla.engine.domain.const.numeric import MAX_KRONECKER_DIM
from recinla.engine.domain.gmrf import build_block_precision
from recinla.engine.domain.likelihood import grad_hess_eta, loglik
from recinla.engine.domain.model.approx import FitResult, GaussianApprox, HyperGrid, LatentMarginals, PosteriorSummary
from recinla.engine.domain.model.assembly import ConstraintSet, ModelAssembly
from recinla.engine.domain.model.errors import (
    ConvergenceError,
    FactorizationError,
    ModelValidationError,
    NumericalError,
)
from recinla.engine.domain.model.hyper import to_natural
from recinla.engine.domain.model.sparse import CholeskyFactor, SparseSymmetric
from recinla.engine.infrastructure.config import EngineConfig
from recinla.engine.infrastructure.trace_logger import get_flagged_point_logger

logger = logging.getLogger(__name__)

_LOG_2PI = float(np.log(2.0 * np.pi))


class LaplaceEngine:
    def __init__(
        self,
        solver: BaseCholeskySolver,
        settings: EngineConfig = None,
        max_kronecker_dim: int = MAX_KRONECKER_DIM,
    ):
        """
        Initialize LaplaceEngine with injected dependencies.

        Args:
            solver: Sparse Cholesky service
            settings: Newton, exploration and grid settings
            max_kronecker_dim: Size guard for Kronecker blocks
        """
        self.solver = solver
        self.settings = settings or EngineConfig()
        self.max_kronecker_dim = max_kronecker_dim

    # ------------------------------------------------------------------
    # Latent prior and Gaussian densities
    # ------------------------------------------------------------------

    @staticmethod
    def _block_natural(block, model: ModelAssembly, values: dict) -> dict:
        natural = dict(block.fixed_params)
        for role, name in block.hyper_bindings.items():
            natural[role] = float(to_natural(model.hyper_layout.get(name).transform, values[name]))
        return natural

    def prior_precision(self, model: ModelAssembly, theta: Sequence[float]) -> SparseSymmetric:
        """Block-diagonal prior precision of the latent field at theta."""
        values = model.hyper_layout.theta_values(theta)
        mats = [
            build_block_precision(b, self._block_natural(b, model, values), self.max_kronecker_dim).to_csc()
            for b in model.latent_blocks
        ]
        return SparseSymmetric.from_matrix(sp.block_diag(mats, format="csc"))

    @staticmethod
    def prior_mean(model: ModelAssembly) -> np.ndarray:
        parts = [
            np.asarray(b.prior_mean, dtype=np.float64) if b.prior_mean is not None else np.zeros(b.size)
            for b in model.latent_blocks
        ]
        return np.concatenate(parts)

    def latent_prior(self, model: ModelAssembly, theta: Sequence[float]) -> GaussianApprox:
        """The block prior as a GaussianApprox, conditioned on the model constraints."""
        q = self.prior_precision(model, theta)
        factor = self.solver.cholesky(q)
        constraints = model.constraints()
        mean = self.prior_mean(model)
        if constraints is not None:
            mean = self.condition(factor, constraints, mean)
        return GaussianApprox(
            mode=mean,
            precision=q,
            factor=factor,
            log_gauss_at_mode=self.gaussian_normalizer(factor, constraints),
            constraints=constraints,
        )

    def condition(self, factor: CholeskyFactor, constraints: ConstraintSet, x: np.ndarray) -> np.ndarray:
        """x - Q^-1 C^T (C Q^-1 C^T)^-1 (C x - e)."""
        c = constraints.matrix
        v = self.solver.solve(factor, np.ascontiguousarray(c.T))
        s = c @ v
        return x - v @ np.linalg.solve(s, c @ x - constraints.values)

    def _constraint_correction(self, factor: CholeskyFactor, constraints: ConstraintSet, mean: np.ndarray) -> float:
        """-1/2 log|C C^T| - log N(e; C mean, C Q^-1 C^T)."""
        c = constraints.matrix
        v = self.solver.solve(factor, np.ascontiguousarray(c.T))
        s = c @ v
        r = constraints.values - c @ mean
        _, logdet_s = np.linalg.slogdet(s)
        _, logdet_cct = np.linalg.slogdet(c @ c.T)
        log_gauss = -0.5 * constraints.count * _LOG_2PI - 0.5 * logdet_s - 0.5 * float(r @ np.linalg.solve(s, r))
        return float(-0.5 * logdet_cct - log_gauss)

    def gaussian_normalizer(self, factor: CholeskyFactor, constraints: Optional[ConstraintSet]) -> float:
        value = -0.5 * factor.dim * _LOG_2PI + 0.5 * factor.log_det
        if constraints is not None:
            # the mode satisfies the constraints, so the residual term vanishes
            value += self._constraint_correction(factor, constraints, self._feasible_point(constraints))
        return float(value)

    @staticmethod
    def _feasible_point(constraints: ConstraintSet) -> np.ndarray:
        c = constraints.matrix
        return c.T @ np.linalg.solve(c @ c.T, constraints.values)

    @staticmethod
    def effective_precision(approx: GaussianApprox) -> sp.csc_matrix:
        q = approx.precision.to_csc()
        if approx.factor.jitter > 0:
            q = sp.csc_matrix(q + approx.factor.jitter * sp.identity(approx.dim))
        return q

    def log_density(self, approx: GaussianApprox, x: np.ndarray) -> float:
        """
        Log density of x under the (possibly constrained) Gaussian approx.

        The precision used is the one that was factorized, jitter included.
        """
        x = np.asarray(x, dtype=np.float64)
        r = x - approx.mode
        quad = float(r @ (self.effective_precision(approx) @ r))
        return float(approx.log_gauss_at_mode - 0.5 * quad)

    # ------------------------------------------------------------------
    # Likelihood plumbing
    # ------------------------------------------------------------------

    @staticmethod
    def _split(model: ModelAssembly, eta: np.ndarray) -> list:
        out, start = [], 0
        for block in model.observation_blocks:
            out.append(eta[start:start + block.size])
            start += block.size
        return out

    def total_loglik(self, model: ModelAssembly, values: dict, eta: np.ndarray) -> float:
        return float(sum(loglik(b, e, values) for b, e in zip(model.observation_blocks, self._split(model, eta))))

    def _eta_derivatives(self, model: ModelAssembly, values: dict, eta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        grads, curvs = [], []
        for block, part in zip(model.observation_blocks, self._split(model, eta)):
            g, c = grad_hess_eta(block, part, values)
            grads.append(g)
            curvs.append(c)
        return np.concatenate(grads), np.concatenate(curvs)

    # ------------------------------------------------------------------
    # Gaussian approximation
    # ------------------------------------------------------------------

    def gaussian_approximation(
        self,
        model: ModelAssembly,
        theta: Sequence[float],
        latent_prior: GaussianApprox = None,
    ) -> GaussianApprox:
        """
        Newton iteration with step halving for the mode of pi(x | y, theta).

        Args:
            model: Model assembly
            theta: Internal-scale hyperparameter vector
            latent_prior: Gaussian prior replacing the block prior (recursion hook)

        Returns:
            GaussianApprox at the mode; converged is False when Newton
            stalls or exhausts its iterations

        Raises:
            FactorizationError: If the Hessian cannot be factorized
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        values = model.hyper_layout.theta_values(theta)
        prior = latent_prior if latent_prior is not None else self.latent_prior(model, theta)
        if prior.dim != model.latent_dim:
            raise ModelValidationError(f"latent prior has dim {prior.dim}, model latent dim is {model.latent_dim}")
        if model.n_observations == 0:
            return prior

        design = model.design(values)
        q_prior = self.effective_precision(prior)
        mu = prior.mode
        b_prior = q_prior @ mu
        constraints = prior.constraints

        def objective(x: np.ndarray) -> float:
            r = x - mu
            try:
                return self.total_loglik(model, values, design @ x) - 0.5 * float(r @ (q_prior @ r))
            except ModelValidationError:
                return float("-inf")

        x = mu.copy()
        value = objective(x)
        trace = [value]
        converged = False
        factor = None
        hessian = None
        iteration = 0
        for iteration in range(1, self.settings.newton_max_iter + 1):
            eta = design @ x
            grad, curv = self._eta_derivatives(model, values, eta)
            hessian = SparseSymmetric.from_matrix(q_prior + design.T @ sp.diags(curv) @ design)
            factor = self.solver.cholesky(hessian)
            target = self.solver.solve(factor, b_prior + design.T @ (grad + curv * eta))
            if constraints is not None:
                target = self.condition(factor, constraints, target)
            step = target - x
            # convergence is judged on the undamped Newton step
            step_norm = float(np.max(np.abs(step))) if step.size else 0.0

            scale = 1.0
            accepted = False
            while scale >= 2.0 ** -30:
                candidate = x + scale * step
                candidate_value = objective(candidate)
                if np.isfinite(candidate_value) and candidate_value >= value - 1e-10 * (1.0 + abs(value)):
                    accepted = True
                    break
                scale *= 0.5
            if not accepted:
                logger.warning(f"Newton line search stalled at iteration {iteration} for theta={theta}")
                break
            x = candidate
            value = candidate_value
            trace.append(value)
            logger.debug(f"Newton iteration {iteration}: objective={value:.10g}, step={step_norm:.3e}, scale={scale}")
            if (model.is_gaussian and scale == 1.0) or step_norm <= self.settings.newton_tol:
                converged = True
                break

        if not converged:
            logger.warning(f"Newton did not converge after {iteration} iterations for theta={theta}")
            get_flagged_point_logger().log_flagged_point(theta, "non_converged")

        if not model.is_gaussian or factor is None:
            eta = design @ x
            _, curv = self._eta_derivatives(model, values, eta)
            hessian = SparseSymmetric.from_matrix(q_prior + design.T @ sp.diags(curv) @ design)
            factor = self.solver.cholesky(hessian)

        return GaussianApprox(
            mode=x,
            precision=hessian,
            factor=factor,
            log_gauss_at_mode=self.gaussian_normalizer(factor, constraints),
            constraints=constraints,
            converged=converged,
            iterations=iteration,
            objective_trace=tuple(trace),
        )

    def conditional_log_evidence(
        self,
        model: ModelAssembly,
        theta: Sequence[float],
        latent_prior: GaussianApprox = None,
    ) -> tuple[float, GaussianApprox]:
        """
        log p(y | theta) by the Laplace identity at the mode:
        loglik(x*) + log prior(x*) - log pi_G(x*).
        """
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        prior = latent_prior if latent_prior is not None else self.latent_prior(model, theta)
        approx = self.gaussian_approximation(model, theta, prior)
        values = model.hyper_layout.theta_values(theta)
        data_term = self.total_loglik(model, values, model.design(values) @ approx.mode) if model.n_observations else 0.0
        value = data_term + self.log_density(prior, approx.mode) - approx.log_gauss_at_mode
        return float(value), approx

    def log_hyper_posterior(
        self,
        model: ModelAssembly,
        theta: Sequence[float],
        latent_prior: GaussianApprox = None,
    ) -> tuple[float, GaussianApprox]:
        """Unnormalized log pi(theta | y) and the approximation at theta."""
        value, approx = self.conditional_log_evidence(model, theta, latent_prior)
        return value + model.hyper_layout.prior_log_density(theta), approx

    def _safe_log_posterior(self, model: ModelAssembly, theta: np.ndarray) -> tuple[float, Optional[GaussianApprox]]:
        try:
            return self.log_hyper_posterior(model, theta)
        except (NumericalError, ModelValidationError) as e:
            logger.debug(f"log posterior undefined at theta={theta}: {e}")
            return float("-inf"), None

    # ------------------------------------------------------------------
    # Hyperparameter mode and curvature
    # ------------------------------------------------------------------

    def _value_function(self, model: ModelAssembly) -> Callable[[np.ndarray], float]:
        cache: dict[bytes, float] = {}

        def value(theta: np.ndarray) -> float:
            theta = np.asarray(theta, dtype=np.float64)
            key = theta.tobytes()
            if key not in cache:
                cache[key] = self._safe_log_posterior(model, theta)[0]
            return cache[key]

        return value

    def hyper_gradient(self, model: ModelAssembly, theta: Sequence[float], value: Callable = None) -> np.ndarray:
        """Central-difference gradient of log pi(theta | y)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        value = value or self._value_function(model)
        h = self.settings.hessian_step
        grad = np.zeros(theta.size)
        for i in range(theta.size):
            e = np.zeros(theta.size)
            e[i] = h
            plus, minus = value(theta + e), value(theta - e)
            if np.isfinite(plus) and np.isfinite(minus):
                grad[i] = (plus - minus) / (2.0 * h)
            else:
                centre = value(theta)
                if np.isfinite(plus) and np.isfinite(centre):
                    grad[i] = (plus - centre) / h
                elif np.isfinite(minus) and np.isfinite(centre):
                    grad[i] = (centre - minus) / h
        return grad

    def hyper_hessian(self, model: ModelAssembly, theta: Sequence[float], value: Callable = None) -> np.ndarray:
        """Symmetrized central-difference Hessian of log pi(theta | y)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        value = value or self._value_function(model)
        h = self.settings.hessian_step
        d = theta.size
        centre = value(theta)
        hess = np.zeros((d, d))
        basis = np.eye(d) * h
        for i in range(d):
            hess[i, i] = (value(theta + basis[i]) - 2.0 * centre + value(theta - basis[i])) / (h * h)
            for j in range(i + 1, d):
                hess[i, j] = (
                    value(theta + basis[i] + basis[j])
                    - value(theta + basis[i] - basis[j])
                    - value(theta - basis[i] + basis[j])
                    + value(theta - basis[i] - basis[j])
                ) / (4.0 * h * h)
                hess[j, i] = hess[i, j]
        return 0.5 * (hess + hess.T)

    def find_mode(self, model: ModelAssembly) -> tuple[np.ndarray, int]:
        """
        BFGS on -log pi(theta | y) from the layout's initial point.

        Raises:
            ConvergenceError: If the search fails away from a stationary point
        """
        theta0 = model.hyper_layout.initial_point()
        if theta0.size == 0:
            return theta0, 0
        value = self._value_function(model)
        if not np.isfinite(value(theta0)):
            raise ConvergenceError(f"log posterior is not finite at the initial point {theta0}")

        def objective(theta):
            v = value(theta)
            return -v if np.isfinite(v) else np.inf

        def jac(theta):
            return -self.hyper_gradient(model, theta, value)

        result = minimize(
            objective,
            theta0,
            jac=jac,
            method="BFGS",
            options={"gtol": self.settings.mode_gtol, "maxiter": 200},
        )
        gradient = jac(result.x)
        if not result.success and not (np.all(np.isfinite(gradient)) and np.max(np.abs(gradient)) < 1e-2):
            raise ConvergenceError(f"hyperparameter mode search failed: {result.message}")
        logger.info(f"Hyperparameter mode {result.x} after {result.nit} BFGS iterations")
        return np.asarray(result.x, dtype=np.float64), int(result.nit)

    # ------------------------------------------------------------------
    # Exploration
    # ------------------------------------------------------------------

    def _resolve_strategy(self, dim: int) -> ExplorationStrategy:
        strategy = ExplorationStrategy(self.settings.strategy)
        if strategy == ExplorationStrategy.AUTO:
            return ExplorationStrategy.AXIS_GRID if dim <= 2 else ExplorationStrategy.CCD_LITE
        return strategy

    def map_points(self, fn: Callable, items: Sequence) -> list:
        """Apply fn to every item; results are returned in item order."""
        items = list(items)
        if self.settings.max_workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.settings.max_workers) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    def evaluate_points(self, model: ModelAssembly, points: np.ndarray) -> tuple[np.ndarray, list]:
        """log pi(theta_k | y) and the approximation at every point."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        results = self.map_points(lambda theta: self._safe_log_posterior(model, theta), points)
        flagged = get_flagged_point_logger()
        for k, (value, approx) in enumerate(results):
            if approx is None:
                flagged.log_flagged_point(points[k], "factorization_failed", index=k)
        return np.array([r[0] for r in results], dtype=np.float64), [r[1] for r in results]

    def explore(self, model: ModelAssembly) -> tuple[HyperGrid, list]:
        """Mode search, curvature, support design and per-point approximations."""
        layout = model.hyper_layout
        d = layout.dim
        names = tuple(layout.free_names)
        transforms = tuple(p.transform for p in layout.free)
        if d == 0:
            log_density, approxes = self.evaluate_points(model, np.zeros((1, 0)))
            grid = HyperGrid(
                points=np.zeros((1, 0)),
                log_density=log_density,
                weights=np.ones(1),
                mode_index=0,
                curvature=np.zeros((0, 0)),
                theta_mode=np.zeros(0),
                scaling=np.zeros((0, 0)),
                z_points=np.zeros((1, 0)),
                strategy=ExplorationStrategy.AXIS_GRID,
                lattice_index=np.zeros((1, 0), dtype=np.int64),
                shell=np.zeros(1, dtype=bool),
                names=names,
                transforms=transforms,
            )
            return grid, approxes

        mode, _ = self.find_mode(model)
        value = self._value_function(model)
        curvature = -self.hyper_hessian(model, mode, value)
        scaling, _ = standardization(curvature)
        volume = abs(float(np.linalg.det(scaling)))
        strategy = self._resolve_strategy(d)
        step = self.settings.step_size

        if strategy == ExplorationStrategy.AXIS_GRID:
            cache: dict[tuple, Optional[GaussianApprox]] = {}

            def evaluate(index: tuple) -> float:
                theta = mode + scaling @ (step * np.asarray(index, dtype=np.float64))
                ld, approx = self._safe_log_posterior(model, theta)
                cache[index] = approx
                logger.debug(f"Axis grid point {index}: log density {ld:.6f}")
                return ld

            retained, shell = axis_grid(
                evaluate, d, step, self.settings.drop_threshold, self.settings.max_axis_steps
            )
            lattice_index = np.array(list(retained.keys()), dtype=np.int64).reshape(-1, d)
            z_points = step * lattice_index.astype(np.float64)
            log_density = np.array(list(retained.values()), dtype=np.float64)
            approxes = [cache[k] for k in retained]
            weights = np.full(log_density.size, step ** d * volume)
        else:
            z_points, design_weights, shell = ccd_design(d, self.settings.ccd_radius_factor)
            points = mode + z_points @ scaling.T
            log_density, approxes = self.evaluate_points(model, points)
            weights = design_weights * volume
            lattice_index = None

        points = mode + z_points @ scaling.T
        if not np.any(np.isfinite(log_density)):
            raise FactorizationError("no support point could be evaluated")
        grid = HyperGrid(
            points=points,
            log_density=log_density,
            weights=weights,
            mode_index=int(np.argmax(log_density)),
            curvature=curvature,
            theta_mode=mode,
            scaling=scaling,
            z_points=z_points,
            strategy=strategy,
            step_size=step,
            lattice_index=lattice_index,
            shell=shell,
            names=names,
            transforms=transforms,
        )
        logger.info(f"Explored {grid.size} support points with {strategy.value} in {d} dimensions")
        return grid, approxes

    def explore_hyperparameters(self, model: ModelAssembly) -> HyperGrid:
        return self.explore(model)[0]

    # ------------------------------------------------------------------
    # Marginals
    # ------------------------------------------------------------------

    def constrained_variances(self, approx: GaussianApprox) -> np.ndarray:
        """diag of the covariance after conditioning on the constraints."""
        variances = self.solver.marginal_variances(approx.factor)
        if approx.constraints is None:
            return variances
        c = approx.constraints.matrix
        v = self.solver.solve(approx.factor, np.ascontiguousarray(c.T))
        s = c @ v
        correction = np.sum((v @ np.linalg.inv(s)) * v, axis=1)
        return np.maximum(variances - correction, 0.0)

    def linear_combination(
        self,
        grid: HyperGrid,
        approxes: Sequence[Optional[GaussianApprox]],
        vector: np.ndarray,
    ) -> tuple[float, float]:
        """Posterior mean and sd of a^T x, mixed over the support points."""
        vector = np.asarray(vector, dtype=np.float64)
        weights = grid.normalized_weights()
        means, variances, live = [], [], []
        for k, approx in enumerate(approxes):
            if approx is None or weights[k] == 0:
                continue
            v = self.solver.solve(approx.factor, vector)
            var = float(vector @ v)
            if approx.constraints is not None:
                c = approx.constraints.matrix
                w = self.solver.solve(approx.factor, np.ascontiguousarray(c.T))
                cv = c @ v
                var -= float(cv @ np.linalg.solve(c @ w, cv))
            means.append(float(vector @ approx.mode))
            variances.append(max(var, 0.0))
            live.append(weights[k])
        if not live:
            raise FactorizationError("no support point carries posterior mass")
        w = np.asarray(live) / np.sum(live)
        means, variances = np.asarray(means), np.asarray(variances)
        mean = float(w @ means)
        return mean, float(np.sqrt(max(w @ (variances + means * means) - mean * mean, 0.0)))

    def latent_marginals(self, grid: HyperGrid, approxes: Sequence[Optional[GaussianApprox]]) -> LatentMarginals:
        """Per-node mixture over support points, weights exp(log density) * Delta."""
        weights = grid.normalized_weights()
        live = [k for k, a in enumerate(approxes) if a is not None and weights[k] > 0]
        if not live:
            raise FactorizationError("no support point carries posterior mass")
        means = np.vstack([approxes[k].mode for k in live])
        variances = np.vstack([self.constrained_variances(approxes[k]) for k in live])
        w = weights[live]
        return mixture_marginals(means, variances, w / w.sum(), self.settings.latent_grid_points)

    def hyper_marginals(self, grid: HyperGrid) -> tuple:
        return hyper_marginals(grid, self.settings.hyper_grid_points)

    @staticmethod
    def log_marginal_likelihood(grid: HyperGrid) -> float:
        return log_evidence(grid)

    def summarize(
        self,
        grid: HyperGrid,
        approxes: Sequence[Optional[GaussianApprox]],
        method: str = "full",
        metadata: dict = None,
    ) -> PosteriorSummary:
        live = [a for a in approxes if a is not None]
        meta = {
            "mode": [float(v) for v in grid.theta_mode],
            "names": list(grid.names),
            "strategy": grid.strategy.value,
            "n_points": grid.size,
            "newton_iterations": [int(a.iterations) if a is not None else None for a in approxes],
            "all_converged": bool(all(a.converged for a in live)),
        }
        meta.update(metadata or {})
        return PosteriorSummary(
            latent_marginals=self.latent_marginals(grid, approxes),
            hyper_marginals=self.hyper_marginals(grid),
            log_marginal_likelihood=self.log_marginal_likelihood(grid),
            method=method,
            metadata=meta,
        )

    def fit(self, model: ModelAssembly, grid: HyperGrid = None) -> FitResult:
        """
        Full fit: explore, approximate per point, summarize.

        Args:
            model: Model assembly
            grid: Optional fixed design; its points are re-evaluated on model

        Returns:
            FitResult(summary, grid, approxes)
        """
        start = time.perf_counter()
        if grid is None:
            grid, approxes = self.explore(model)
        else:
            log_density, approxes = self.evaluate_points(model, grid.points)
            if not np.any(np.isfinite(log_density)):
                raise FactorizationError("no support point could be evaluated")
            grid = replace(grid, log_density=log_density, mode_index=int(np.argmax(log_density)))
        summary = self.summarize(grid, approxes, metadata={"runtime_seconds": time.perf_counter() - start})
        logger.info(
            f"Fit complete: {grid.size} support points, "
            f"log marginal likelihood {summary.log_marginal_likelihood:.6f}"
        )
        return FitResult(summary, grid, approxes)
