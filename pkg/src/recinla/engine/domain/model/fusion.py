#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 27, 2025 09:05:17$"

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional

import numpy as np
import scipy.sparse as sp

from recinla.engine.domain.const.model import AggregationMode
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.hyper import HyperPrior


@dataclass(frozen=True)
class Region:
    id: Hashable
    member_points: tuple
    measure: float = 1.0

    def __post_init__(self):
        members = tuple(int(i) for i in self.member_points)
        if not members:
            raise ModelValidationError(f"region {self.id!r} has no member points")
        if not self.measure > 0:
            raise ModelValidationError(f"region {self.id!r} needs a positive measure")
        object.__setattr__(self, "member_points", members)


@dataclass(frozen=True)
class AggregationOperator:
    matrix: sp.csr_matrix
    mode: AggregationMode
    provenance: str
    row_ids: tuple = ()

    @property
    def shape(self) -> tuple:
        return self.matrix.shape

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=np.float64)

    def compose(self, inner: "AggregationOperator") -> "AggregationOperator":
        """self after inner: coarse <- mid <- fine."""
        return AggregationOperator(
            matrix=sp.csr_matrix(self.matrix @ inner.matrix),
            mode=self.mode,
            provenance=f"{self.provenance}*{inner.provenance}",
            row_ids=self.row_ids,
        )


@dataclass(frozen=True)
class CategoricalGrouping:
    """
    groups: one tuple of fine-level indices per coarse group.
    weights: optional per-group weight vectors aligned with the group
    members; None means balanced (unit weight per member).
    """
    fine_levels: tuple
    groups: tuple
    weights: Optional[tuple] = None

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        seen = set()
        for group in groups:
            if not group:
                raise ModelValidationError("empty categorical group")
            if seen.intersection(group):
                raise ModelValidationError("categorical groups must be pairwise disjoint")
            if min(group) < 0 or max(group) >= len(self.fine_levels):
                raise ModelValidationError("group member outside the fine levels")
            seen.update(group)
        object.__setattr__(self, "groups", groups)
        if self.weights is not None:
            weights = tuple(np.asarray(w, dtype=np.float64) for w in self.weights)
            if len(weights) != len(groups) or any(w.size != len(g) for w, g in zip(weights, groups)):
                raise ModelValidationError("weights must align with the group members")
            object.__setattr__(self, "weights", weights)

    @classmethod
    def from_counts(cls, fine_levels, groups, counts) -> "CategoricalGrouping":
        """Weights w_ik = n_i / sum of n over group k."""
        counts = np.asarray(counts, dtype=np.float64)
        weights = []
        for group in groups:
            c = counts[list(group)]
            if c.sum() <= 0:
                raise ModelValidationError("group with zero total count")
            weights.append(c / c.sum())
        return cls(tuple(fine_levels), tuple(tuple(g) for g in groups), tuple(weights))


@dataclass(frozen=True)
class ExpertSpec:
    """
    Correlated errors of M sources per coarse entry (u_B).

    Observation r belongs to source source_index[r] and replicate
    replicate_index[r]; latent nodes are ordered replicate-major.
    """
    n_sources: int
    source_index: np.ndarray
    replicate_index: np.ndarray
    n_replicates: int
    tau_bindings: tuple
    rho_bindings: tuple

    def __post_init__(self):
        object.__setattr__(self, "source_index", np.asarray(self.source_index, dtype=np.int64))
        object.__setattr__(self, "replicate_index", np.asarray(self.replicate_index, dtype=np.int64))
        pairs = self.n_sources * (self.n_sources - 1) // 2
        if len(self.tau_bindings) != self.n_sources or len(self.rho_bindings) != pairs:
            raise ModelValidationError(
                f"expert block needs {self.n_sources} tau and {pairs} rho bindings"
            )


@dataclass(frozen=True)
class SharedPredictorSpec:
    """
    How a secondary source sees the shared latent field.

    field_design maps the primary latent vector to fine-scale predictor
    entries that the operator aggregates; direct_design (coarse x primary)
    is added unaggregated. Observation r reads coarse entry entry_index[r].
    """
    field_design: sp.csr_matrix
    entry_index: np.ndarray
    direct_design: Optional[sp.csr_matrix] = None
    alpha_binding: Optional[str] = None
    alpha_value: float = 1.0
    residual_binding: Optional[str] = None
    expert: Optional[ExpertSpec] = None
    intercept_name: Optional[str] = None
    intercept_index: Optional[np.ndarray] = None
    priors: Mapping[str, HyperPrior] = field(default_factory=dict)
    initial: Mapping[str, float] = field(default_factory=dict)
    name: str = "secondary"

    def __post_init__(self):
        object.__setattr__(self, "field_design", sp.csr_matrix(self.field_design))
        object.__setattr__(self, "entry_index", np.asarray(self.entry_index, dtype=np.int64))
        if self.direct_design is not None:
            object.__setattr__(self, "direct_design", sp.csr_matrix(self.direct_design))
        if self.intercept_index is not None:
            object.__setattr__(self, "intercept_index", np.asarray(self.intercept_index, dtype=np.int64))
