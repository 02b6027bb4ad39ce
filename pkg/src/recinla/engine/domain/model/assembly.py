#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 24, 2025 14:20:09$"

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from recinla.engine.domain.const.model import LikelihoodFamily, Transform
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.hyper import HyperLayout
from recinla.engine.domain.model.latent import LatentBlockSpec
from recinla.engine.domain.model.likelihood import ObservationBlock


@dataclass(frozen=True)
class ConstraintSet:
    """Global constraints C x = e."""
    matrix: np.ndarray
    values: np.ndarray

    @property
    def count(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True)
class ModelAssembly:
    """
    Latent blocks laid out consecutively in the global node index,
    observation blocks over that index, and the hyperparameter layout.
    """
    latent_blocks: tuple
    observation_blocks: tuple
    hyper_layout: HyperLayout

    def __post_init__(self):
        object.__setattr__(self, "latent_blocks", tuple(self.latent_blocks))
        object.__setattr__(self, "observation_blocks", tuple(self.observation_blocks))
        names = [b.name for b in self.latent_blocks]
        if len(set(names)) != len(names):
            raise ModelValidationError(f"duplicate latent block names: {names}")
        if not self.latent_blocks:
            raise ModelValidationError("model needs at least one latent block")
        self._check_bindings()
        for block in self.observation_blocks:
            self._check_observation_block(block)

    def _check_bindings(self):
        layout = self.hyper_layout
        for block in self.latent_blocks:
            for role, name in block.hyper_bindings.items():
                if name not in layout:
                    raise ModelValidationError(f"block '{block.name}' role '{role}' -> unknown hyperparameter '{name}'")

    def _check_observation_block(self, block: ObservationBlock):
        if block.n_latent != self.latent_dim:
            raise ModelValidationError(
                f"observation block '{block.name}' has {block.n_latent} columns, latent dim is {self.latent_dim}"
            )
        binding = block.likelihood.precision_binding
        if binding is not None:
            if binding not in self.hyper_layout:
                raise ModelValidationError(f"observation block '{block.name}' -> unknown hyperparameter '{binding}'")
            if self.hyper_layout.get(binding).transform != Transform.LOG:
                raise ModelValidationError(f"precision hyperparameter '{binding}' must be log-transformed")
        if block.scale_binding is not None and block.scale_binding not in self.hyper_layout:
            raise ModelValidationError(f"observation block '{block.name}' -> unknown scale '{block.scale_binding}'")

    @property
    def latent_dim(self) -> int:
        return int(sum(b.size for b in self.latent_blocks))

    @property
    def block_offsets(self) -> dict[str, int]:
        offsets, start = {}, 0
        for block in self.latent_blocks:
            offsets[block.name] = start
            start += block.size
        return offsets

    def block_slice(self, name: str) -> slice:
        offset = self.block_offsets[name]
        return slice(offset, offset + self.block(name).size)

    def block(self, name: str) -> LatentBlockSpec:
        for block in self.latent_blocks:
            if block.name == name:
                return block
        raise ModelValidationError(f"unknown latent block '{name}'")

    @property
    def n_observations(self) -> int:
        return int(sum(b.size for b in self.observation_blocks))

    @property
    def is_gaussian(self) -> bool:
        return all(b.likelihood.family == LikelihoodFamily.GAUSSIAN for b in self.observation_blocks)

    def constraints(self) -> Optional[ConstraintSet]:
        rows, values = [], []
        offsets = self.block_offsets
        for block in self.latent_blocks:
            for constraint in block.constraints:
                row = np.zeros(self.latent_dim)
                row[offsets[block.name]:offsets[block.name] + block.size] = constraint.vector
                rows.append(row)
                values.append(constraint.value)
        if not rows:
            return None
        return ConstraintSet(matrix=np.vstack(rows), values=np.asarray(values, dtype=np.float64))

    def design(self, values: dict) -> sp.csr_matrix:
        """Stacked design of all observation blocks for internal hyper values."""
        if not self.observation_blocks:
            return sp.csr_matrix((0, self.latent_dim))
        mats = [b.design(values[b.scale_binding] if b.scale_binding else None) for b in self.observation_blocks]
        return sp.csr_matrix(sp.vstack(mats))

    def with_observations(self, blocks: Sequence[ObservationBlock]) -> "ModelAssembly":
        return ModelAssembly(self.latent_blocks, tuple(blocks), self.hyper_layout)

    def with_latent_blocks(self, blocks: Sequence[LatentBlockSpec]) -> "ModelAssembly":
        return ModelAssembly(tuple(blocks), self.observation_blocks, self.hyper_layout)

    def with_layout(self, layout: HyperLayout) -> "ModelAssembly":
        return replace(self, hyper_layout=layout)
