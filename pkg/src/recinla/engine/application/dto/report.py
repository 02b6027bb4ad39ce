#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 28, 2025 09:40:03$"

from typing import Optional

from pydantic import BaseModel, Field


class TruthMetrics(BaseModel):
    block: str
    rmse: float
    coverage_95: float


class HyperSummary(BaseModel):
    name: str
    natural_mode: float
    natural_mean: float
    internal_mean: float
    internal_sd: float
    degenerate: bool = False


class ResourceUsage(BaseModel):
    wall_clock_seconds: float
    peak_traced_mb: float
    rss_delta_mb: float


class MethodSection(BaseModel):
    method: str
    log_marginal_likelihood: float
    n_support_points: int
    hyperparameters: list[HyperSummary]
    truth: Optional[TruthMetrics] = None
    resources: ResourceUsage


class MethodDifference(BaseModel):
    """Node-wise and hyperparameter differences of `method` against `reference`."""
    method: str
    reference: str
    max_abs_mean_diff: float
    max_abs_sd_diff: float
    max_mean_diff_in_sd: float
    hyper_mode_relative_diff: dict[str, float]


class DiscrepancySection(BaseModel):
    """
    Recursive minus full-data log density on the same support points,
    both centred at the mode point.
    """
    mode_index: int
    per_point: list[float]
    max_abs: float
    max_abs_mean_diff_same_design: float


class ComparisonReport(BaseModel):
    name: str
    seed: int
    dataset: str
    n_latent: int
    n_observations: int
    n_partitions: int
    full: Optional[MethodSection] = None
    recursive: Optional[MethodSection] = None
    consensus: Optional[MethodSection] = None
    recursive_vs_full: Optional[MethodDifference] = None
    consensus_vs_full: Optional[MethodDifference] = None
    discrepancy: Optional[DiscrepancySection] = None
    errors: dict[str, str] = Field(default_factory=dict)

    def comparable(self) -> dict:
        """Report content without timing and memory figures."""
        return self.model_dump(exclude={
            "full": {"resources"},
            "recursive": {"resources"},
            "consensus": {"resources"},
        })


class FusionReplicate(BaseModel):
    replicate: int
    seed: int
    structure: str
    rmse_observations_only: float
    rmse_joint: float
    coverage_joint: float


class CategoricalReplicate(BaseModel):
    replicate: int
    seed: int
    sd_single: dict[str, float]
    sd_joint: dict[str, float]
    aggregate_mean: float
    aggregate_sd: float
    direct_estimate: float


class ReplicateStudy(BaseModel):
    name: str
    fusion: list[FusionReplicate] = Field(default_factory=list)
    categorical: list[CategoricalReplicate] = Field(default_factory=list)

    def fusion_wins(self) -> dict[str, int]:
        """Replicates per structure where the joint model beats observations only."""
        wins: dict[str, int] = {}
        for row in self.fusion:
            wins.setdefault(row.structure, 0)
            if row.rmse_joint < row.rmse_observations_only:
                wins[row.structure] += 1
        return wins
