#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 28, 2025 10:02:17$"

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from recinla.engine.domain.model.errors import ModelValidationError

OBSERVATION_COLUMNS = ("response", "site", "time", "level", "region", "source", "phi")
TRUTH_COLUMNS = ("component", "index", "value")


@dataclass(frozen=True)
class Dataset:
    """
    Long-format observations with the ground truth they were drawn from.

    observations columns: response, site, time, level, region, source, phi.
    Indices that do not apply to a source are -1. meta carries the lattice
    and timeline sizes, the sources and the region memberships.
    """
    kind: str
    observations: pd.DataFrame
    truth: pd.DataFrame
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [c for c in OBSERVATION_COLUMNS if c not in self.observations.columns]
        if missing:
            raise ModelValidationError(f"observations lack columns {missing}")
        missing = [c for c in TRUTH_COLUMNS if c not in self.truth.columns]
        if missing:
            raise ModelValidationError(f"truth lacks columns {missing}")
        obs = self.observations
        n_sites = self.meta.get("n_sites")
        if n_sites is not None and (obs["site"] >= n_sites).any():
            raise ModelValidationError(f"site index outside the {n_sites} lattice cells")
        n_time = self.meta.get("n_time")
        if n_time is not None and (obs["time"] >= n_time).any():
            raise ModelValidationError(f"time index outside the {n_time} time points")
        sources = self.meta.get("sources")
        if sources is not None:
            unknown = sorted(set(obs["source"]) - set(sources))
            if unknown:
                raise ModelValidationError(f"unknown sources {unknown}")
        if (obs["phi"] <= 0).any():
            raise ModelValidationError("precision scales must be positive")

    def source(self, name: str) -> pd.DataFrame:
        return self.observations[self.observations["source"] == name]

    def truth_vector(self, component: str) -> np.ndarray:
        rows = self.truth[self.truth["component"] == component].sort_values("index")
        if rows.empty:
            raise ModelValidationError(f"no truth recorded for '{component}'")
        return rows["value"].to_numpy(dtype=np.float64)
