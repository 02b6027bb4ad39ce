#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 28, 2025 09:12:40$"

from dataclasses import replace
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from recinla.engine.domain.const.model import ConsensusMode, ExplorationStrategy
from recinla.engine.infrastructure.config import EngineConfig


class SpatialFusionConfig(BaseModel):
    """Point observations plus regional expert values on a lattice."""
    nrow: int = Field(30, ge=2)
    ncol: int = Field(30, ge=2)
    n_points: int = Field(40, ge=1)
    beta0: float = 0.0
    range: float = Field(8.0, gt=0)
    tau_field: float = Field(1.0, gt=0)
    tau_obs: float = Field(25.0, gt=0)
    structure: Literal["S1", "S2"] = "S1"
    s1_blocks: int = Field(3, ge=1)
    s2_patches: int = Field(4, ge=1)
    s2_coverage: float = Field(0.4, gt=0, le=1)
    n_experts: int = Field(2, ge=1)
    expert_tau: float = Field(16.0, gt=0)
    expert_rho: float = Field(0.5, gt=-1, lt=1)
    expert_bias: list[float] = Field(default_factory=lambda: [0.0, 0.0])

    @model_validator(mode="after")
    def check_sizes(self):
        if self.n_points > self.nrow * self.ncol:
            raise ValueError("more point observations than lattice cells")
        if len(self.expert_bias) != self.n_experts:
            raise ValueError("expert_bias needs one entry per expert")
        if self.s1_blocks > min(self.nrow, self.ncol):
            raise ValueError("s1_blocks exceeds the lattice side")
        return self


class CategoricalConfig(BaseModel):
    """Five fine levels observed directly, three coarse levels observed by a second source."""
    n_fine: int = Field(5, ge=2)
    groups: list[list[int]] = Field(default_factory=lambda: [[0, 1, 2], [3], [4]])
    beta0: float = 1.0
    tau_u: float = Field(1.0, gt=0)
    n_per_level_a: int = Field(20, ge=1)
    n_per_level_b: int = Field(20, ge=1)
    tau_a: float = Field(4.0, gt=0)
    tau_b: float = Field(4.0, gt=0)


class SpatioTemporalConfig(BaseModel):
    """Sites on an nrow x ncol lattice observed monthly."""
    nrow: int = Field(5, ge=2)
    ncol: int = Field(10, ge=2)
    n_time: int = Field(60, ge=1)
    beta0: float = 15.0
    rho_t: float = Field(0.7, gt=-1, lt=1)
    range: float = Field(3.0, gt=0)
    tau_st: float = Field(1.0, gt=0)
    tau_obs: float = Field(4.0, gt=0)
    family: Literal["gaussian", "poisson"] = "gaussian"

    @property
    def n_sites(self) -> int:
        return self.nrow * self.ncol


class SimulationConfig(BaseModel):
    kind: Literal["spatial_fusion", "categorical", "spatiotemporal"] = "spatiotemporal"
    spatial_fusion: SpatialFusionConfig = Field(default_factory=SpatialFusionConfig)
    categorical: CategoricalConfig = Field(default_factory=CategoricalConfig)
    spatiotemporal: SpatioTemporalConfig = Field(default_factory=SpatioTemporalConfig)


class PartitionRule(BaseModel):
    """
    time_block: consecutive blocks of `size` time points.
    row_range / random: `count` partitions of the rows, in order or shuffled.
    """
    kind: Literal["time_block", "row_range", "random"] = "time_block"
    size: Optional[int] = Field(None, ge=1)
    count: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind == "time_block" and self.size is None:
            raise ValueError("time_block partitioning needs size")
        if self.kind != "time_block" and self.count is None:
            raise ValueError(f"{self.kind} partitioning needs count")
        return self

    @classmethod
    def parse(cls, text: str) -> "PartitionRule":
        """Parse the command-line forms time:<size>, rows:<count> and random:<count>."""
        kind, _, value = text.partition(":")
        if not value.isdigit():
            raise ValueError(f"partition rule '{text}' must look like time:10, rows:6 or random:4")
        if kind == "time":
            return cls(kind="time_block", size=int(value))
        if kind == "rows":
            return cls(kind="row_range", count=int(value))
        if kind == "random":
            return cls(kind="random", count=int(value))
        raise ValueError(f"unknown partition kind '{kind}'")


class ModelRecipe(BaseModel):
    """
    How the dataset is modelled.

    joint: include the secondary source through its aggregation operator.
    fixed_hyperparameters: natural-scale values held fixed during exploration.
    """
    joint: bool = True
    fixed_hyperparameters: dict[str, float] = Field(default_factory=dict)


class EngineOptions(BaseModel):
    """Per-run overrides of the environment engine settings."""
    strategy: Optional[ExplorationStrategy] = None
    step_size: Optional[float] = Field(None, gt=0)
    drop_threshold: Optional[float] = Field(None, gt=0)
    ccd_radius_factor: Optional[float] = Field(None, ge=1)
    newton_tol: Optional[float] = Field(None, gt=0)
    newton_max_iter: Optional[int] = Field(None, ge=1)
    max_workers: Optional[int] = Field(None, ge=1)

    def apply(self, base: EngineConfig) -> EngineConfig:
        overrides = {k: v for k, v in self.model_dump().items() if v is not None}
        if "strategy" in overrides:
            overrides["strategy"] = ExplorationStrategy(overrides["strategy"]).value
        return replace(base, **overrides)


Method = Literal["full", "recursive", "consensus"]


class ExperimentConfig(BaseModel):
    name: str = "experiment"
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    recipe: ModelRecipe = Field(default_factory=ModelRecipe)
    methods: list[Method] = Field(default_factory=lambda: ["full", "recursive", "consensus"])
    consensus_mode: ConsensusMode = ConsensusMode.MULTIVARIATE
    partitions: PartitionRule = Field(default_factory=lambda: PartitionRule(kind="time_block", size=10))
    engine: EngineOptions = Field(default_factory=EngineOptions)
    seed: int = 20251122
    output_dir: Optional[str] = None

    @field_validator("methods")
    @classmethod
    def unique_methods(cls, methods: list) -> list:
        if not methods:
            raise ValueError("at least one method is required")
        if len(set(methods)) != len(methods):
            raise ValueError("methods must not repeat")
        return methods
