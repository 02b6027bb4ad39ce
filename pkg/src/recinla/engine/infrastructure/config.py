#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 22, 2025 11:12:45$"

import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

# Load environment variables from .env file
# This searches for .env in current directory and parent directories
load_dotenv()


@dataclass
class LinalgConfig:
    """Sparse linear algebra settings."""
    dense_threshold: int = int(os.getenv("RECINLA_DENSE_THRESHOLD", "5000"))
    max_kronecker_dim: int = int(os.getenv("RECINLA_MAX_KRONECKER_DIM", "2000000"))


@dataclass
class JitterConfig:
    """Diagonal jitter applied when a matrix is not numerically positive definite."""
    initial_factor: float = float(os.getenv("RECINLA_JITTER_FACTOR", "1e-5"))
    growth: float = float(os.getenv("RECINLA_JITTER_GROWTH", "10"))
    max_tries: int = int(os.getenv("RECINLA_JITTER_MAX_TRIES", "6"))
    pivot_tolerance: float = float(os.getenv("RECINLA_PIVOT_TOLERANCE", "1e-10"))


@dataclass
class EngineConfig:
    """Laplace engine and hyperparameter exploration settings."""
    strategy: str = os.getenv("RECINLA_STRATEGY", "auto")
    step_size: float = float(os.getenv("RECINLA_STEP_SIZE", "1.0"))
    drop_threshold: float = float(os.getenv("RECINLA_DROP_THRESHOLD", "2.5"))
    ccd_radius_factor: float = float(os.getenv("RECINLA_CCD_RADIUS_FACTOR", "1.1"))
    newton_tol: float = float(os.getenv("RECINLA_NEWTON_TOL", "1e-8"))
    newton_max_iter: int = int(os.getenv("RECINLA_NEWTON_MAX_ITER", "50"))
    hessian_step: float = float(os.getenv("RECINLA_HESSIAN_STEP", "1e-3"))
    mode_gtol: float = float(os.getenv("RECINLA_MODE_GTOL", "1e-5"))
    max_axis_steps: int = int(os.getenv("RECINLA_MAX_AXIS_STEPS", "6"))
    latent_grid_points: int = int(os.getenv("RECINLA_LATENT_GRID", "81"))
    hyper_grid_points: int = int(os.getenv("RECINLA_HYPER_GRID", "81"))
    max_workers: int = int(os.getenv("RECINLA_MAX_WORKERS", "1"))


@dataclass
class DiagnosticsConfig:
    """Recursive drift diagnostics."""
    boundary_mass_threshold: float = float(os.getenv("RECINLA_BOUNDARY_MASS", "0.2"))


@dataclass
class HarnessConfig:
    """Experiment harness defaults."""
    output_dir: str = os.getenv("RECINLA_OUTPUT_DIR", "results")
    seed: int = int(os.getenv("RECINLA_SEED", "20251122"))


@dataclass
class AppConfig:
    """Application-wide configuration."""
    linalg: LinalgConfig = field(default_factory=LinalgConfig)
    jitter: JitterConfig = field(default_factory=JitterConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)

    @classmethod
    def from_env(cls) -> "AppConfig":
        """Create configuration from environment variables."""
        return cls(
            linalg=LinalgConfig(),
            jitter=JitterConfig(),
            engine=EngineConfig(),
            diagnostics=DiagnosticsConfig(),
            harness=HarnessConfig(),
        )
