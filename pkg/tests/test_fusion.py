#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 30, 2025 16:58:40$"

from dataclasses import replace

import numpy as np
import pytest
import scipy.sparse as sp

from recinla.engine.application.use_case.fusion import (
    assemble_joint_model,
    build_areal_operator,
    build_categorical_operator,
    build_expert_covariance,
    build_interval_operator,
    build_voxel_operator,
    nested_areal_weights,
    voxel_members,
)
from recinla.engine.application.use_case.oracle import oracle_conjugate_gaussian
from recinla.engine.domain.const.model import AggregationMode, LatentKind, LikelihoodFamily, Transform
from recinla.engine.domain.gmrf import build_lattice_matern_precision
from recinla.engine.domain.model.assembly import ModelAssembly
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.fusion import CategoricalGrouping, Region, SharedPredictorSpec
from recinla.engine.domain.model.hyper import HyperLayout
from recinla.engine.domain.model.latent import LatentBlockSpec
from recinla.engine.domain.model.likelihood import LikelihoodSpec, ObservationBlock

REGIONS = [Region("north", (0, 1, 2)), Region("south", (3, 4)), Region("all", (0, 1, 2, 3, 4, 5))]


def gaussian_block(values, design, log_precision: float = 0.0) -> ObservationBlock:
    return ObservationBlock(
        values=np.asarray(values, dtype=float),
        predictor_rows=sp.csr_matrix(design),
        likelihood=LikelihoodSpec(LikelihoodFamily.GAUSSIAN, fixed_log_precision=log_precision),
    )


def primary_model(n: int = 4) -> ModelAssembly:
    """n iid nodes with unit precision, each observed once."""
    latent = (LatentBlockSpec(kind=LatentKind.IID, name="field", n=n, fixed_params={"tau": 1.0}),)
    block = gaussian_block(np.linspace(-1.0, 1.0, n), sp.identity(n))
    return ModelAssembly(latent, (block,), HyperLayout(()))


class TestArealOperators:

    def test_mean_rows_sum_to_one(self):
        """Each mean row averages its members."""
        op = build_areal_operator(6, REGIONS, AggregationMode.MEAN)
        assert op.shape == (3, 6)
        assert np.allclose(np.asarray(op.matrix.sum(axis=1)).ravel(), 1.0)
        assert op.row_ids == ("north", "south", "all")

    def test_total_rows_count_members(self):
        """Total rows carry unit weights."""
        op = build_areal_operator(6, REGIONS, AggregationMode.TOTAL)
        assert np.allclose(np.asarray(op.matrix.sum(axis=1)).ravel(), [3.0, 2.0, 6.0])
        assert set(op.matrix.data) == {1.0}

    def test_sites_outside_lattice(self):
        with pytest.raises(ModelValidationError):
            build_areal_operator(4, [Region("far", (2, 7))])

    def test_region_without_members(self):
        with pytest.raises(ModelValidationError):
            Region("void", ())

    def test_interval_operator_allows_overlap(self):
        """Overlapping and partial intervals pick the points inside [t1, t2]."""
        op = build_interval_operator(np.arange(10.0), [(0.0, 4.0), (3.0, 6.0)], AggregationMode.TOTAL)
        dense = op.matrix.toarray()
        assert np.array_equal(np.flatnonzero(dense[0]), [0, 1, 2, 3, 4])
        assert np.array_equal(np.flatnonzero(dense[1]), [3, 4, 5, 6])

    @pytest.mark.parametrize("interval", [(5.0, 5.0), (20.0, 30.0)])
    def test_invalid_intervals(self, interval):
        with pytest.raises(ModelValidationError):
            build_interval_operator(np.arange(10.0), [interval])

    def test_voxels_follow_time_major_order(self):
        """Site t * n_space + cell."""
        members = voxel_members([0, 1], [2, 3], n_space=4)
        assert members == (8, 9, 12, 13)
        op = build_voxel_operator(4, 5, [Region("v", members)])
        assert op.shape == (1, 20)
        assert np.allclose(op.matrix.toarray()[0, list(members)], 0.25)

    def test_compose_applies_inner_first(self):
        """(outer after inner) x == outer(inner(x))."""
        inner = build_areal_operator(6, REGIONS[:2], AggregationMode.MEAN)
        outer = build_areal_operator(2, [Region("both", (0, 1))], AggregationMode.TOTAL)
        x = np.arange(6.0)
        assert np.allclose(outer.compose(inner).apply(x), outer.apply(inner.apply(x)))

    def test_aggregation_commutes_with_sampling(self):
        """Aggregated draws of a lattice field have covariance B Sigma B^T."""
        q = build_lattice_matern_precision(4, 4, range=2.0, tau=1.0).to_dense()
        cov = np.linalg.inv(q)
        op = build_areal_operator(16, [Region("a", (0, 1, 4, 5)), Region("b", tuple(range(8, 16)))])
        draws = np.random.default_rng(3).multivariate_normal(np.zeros(16), cov, size=40000)
        aggregated = np.vstack([op.apply(d) for d in draws[:4000]])
        expected = op.matrix @ cov @ op.matrix.T
        assert np.allclose(np.cov((draws @ op.matrix.T).T), expected, atol=0.05 * np.max(np.abs(expected)))
        assert np.allclose(aggregated, draws[:4000] @ op.matrix.T)


class TestNestedWeights:

    def test_measure_weighted_rows(self):
        """w_jk = |B_k| / |C_j| for the parts of each coarse region."""
        fine = [Region("f0", (0,), 1.0), Region("f1", (1,), 2.0), Region("f2", (2,), 3.0)]
        coarse = [Region("c0", (0, 1), 3.0), Region("c1", (2,), 3.0)]
        op = nested_areal_weights(fine, coarse, [0, 0, 1])
        assert np.allclose(op.matrix.toarray(), [[1 / 3, 2 / 3, 0.0], [0.0, 0.0, 1.0]])

    def test_measures_must_add_up(self):
        fine = [Region("f0", (0,), 1.0), Region("f1", (1,), 1.0)]
        with pytest.raises(ModelValidationError):
            nested_areal_weights(fine, [Region("c0", (0, 1), 3.0)], [0, 0])

    def test_every_coarse_region_needs_parts(self):
        fine = [Region("f0", (0,), 1.0)]
        with pytest.raises(ModelValidationError):
            nested_areal_weights(fine, [Region("c0", (0,), 1.0), Region("c1", (1,), 1.0)], [0])


class TestCategoricalOperator:

    def test_balanced_groups_sum_members(self):
        """u_b1 = u_a1 + u_a2 + u_a3 for a balanced grouping."""
        grouping = CategoricalGrouping(fine_levels=tuple(range(5)), groups=((0, 1, 2), (3,), (4,)))
        op = build_categorical_operator(grouping)
        u = np.array([0.4, -0.1, 0.3, -0.2, -0.4])
        assert op.mode == AggregationMode.TOTAL
        assert np.allclose(op.apply(u), [0.6, -0.2, -0.4])

    def test_sum_zero_vectors_keep_zero_total(self):
        """A covering grouping maps sum-to-zero fine effects to sum-to-zero groups."""
        grouping = CategoricalGrouping(fine_levels=tuple(range(5)), groups=((0, 1, 2), (3,), (4,)))
        op = build_categorical_operator(grouping)
        u = np.random.default_rng(0).normal(size=5)
        u -= u.mean()
        assert op.apply(u).sum() == pytest.approx(0.0, abs=1e-12)

    def test_count_weights_average(self):
        """Weights n_i / sum n give mean rows."""
        grouping = CategoricalGrouping.from_counts(tuple(range(4)), ((0, 1), (2, 3)), [10, 30, 5, 5])
        op = build_categorical_operator(grouping)
        assert op.mode == AggregationMode.MEAN
        assert np.allclose(op.matrix.toarray(), [[0.25, 0.75, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5]])

    def test_bad_weights_rejected(self):
        grouping = CategoricalGrouping(tuple(range(2)), ((0, 1),), weights=(np.array([0.7, 0.7]),))
        with pytest.raises(ModelValidationError):
            build_categorical_operator(grouping)

    def test_overlapping_groups_rejected(self):
        with pytest.raises(ModelValidationError):
            CategoricalGrouping(tuple(range(3)), ((0, 1), (1, 2)))


class TestExpertCovariance:
    """Precision block of correlated expert sources."""

    def test_uncorrelated_unit_precision(self):
        assert np.allclose(build_expert_covariance([1.0, 1.0], [0.0]), np.eye(2))

    def test_two_by_two_inverse(self):
        expected = np.array([[1.0, -0.5], [-0.5, 1.0]]) / 0.75
        assert np.allclose(build_expert_covariance([1.0, 1.0], [0.5]), expected, rtol=1e-12)

    def test_matches_dense_inverse(self):
        sigma = np.array([[0.5, 0.9 / 4.0], [0.9 / 4.0, 0.125]])
        assert np.allclose(build_expert_covariance([2.0, 8.0], [0.9]), np.linalg.inv(sigma), rtol=1e-10)

    def test_indefinite_rejected(self):
        with pytest.raises(ModelValidationError):
            build_expert_covariance([1.0, 1.0, 1.0], [0.99, -0.99, 0.99])


class TestJointModel:

    def test_design_rows(self):
        """Shared rows are alpha * (B field_design)[entry]; residual and intercept columns follow."""
        primary = primary_model(4)
        op = build_areal_operator(4, [Region("r0", (0, 1)), Region("r1", (2, 3))])
        spec = SharedPredictorSpec(
            field_design=sp.identity(4, format="csr"),
            entry_index=np.array([0, 1]),
            alpha_value=2.0,
            residual_binding="coarse_tau",
            intercept_name="coarse_b0",
        )
        secondary = gaussian_block([0.3, -0.2], sp.csr_matrix((2, 4)))
        joint = assemble_joint_model(primary, [(secondary, op, spec)])

        assert joint.latent_dim == 4 + 2 + 1
        assert "coarse_tau" in joint.hyper_layout.names
        design = joint.observation_blocks[1].design().toarray()
        assert np.allclose(design, [
            [1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0],
        ])
        assert joint.observation_blocks[0].n_latent == 7

    def test_identity_operator_is_direct_observation(self):
        """An identity operator with alpha 1 is the same as observing the nodes directly."""
        primary = primary_model(3)
        op = build_areal_operator(3, [Region(i, (i,)) for i in range(3)])
        spec = SharedPredictorSpec(field_design=sp.identity(3, format="csr"), entry_index=np.array([2, 0]))
        secondary = gaussian_block([1.2, -0.4], sp.csr_matrix((2, 3)), log_precision=np.log(2.0))
        joint = assemble_joint_model(primary, [(secondary, op, spec)])

        direct = gaussian_block([1.2, -0.4], sp.csr_matrix(np.array([[0, 0, 1.0], [1.0, 0, 0]])), np.log(2.0))
        stacked = primary.with_observations(primary.observation_blocks + (direct,))
        a = oracle_conjugate_gaussian(joint, [])
        b = oracle_conjugate_gaussian(stacked, [])
        assert np.allclose(a.mean, b.mean)
        assert a.log_evidence == pytest.approx(b.log_evidence)

    @pytest.mark.slow
    def test_zero_alpha_decouples_the_field(self):
        """With alpha 0 the secondary source only informs its intercept, the field posterior is the primary one."""
        primary = primary_model(4)
        op = build_areal_operator(4, [Region("r0", (0, 1)), Region("r1", (2, 3))])
        spec = SharedPredictorSpec(
            field_design=sp.identity(4, format="csr"),
            entry_index=np.array([0, 1]),
            alpha_value=0.0,
            intercept_name="coarse_b0",
        )
        secondary = gaussian_block([3.0, -2.0], sp.csr_matrix((2, 4)), log_precision=np.log(4.0))
        joint = assemble_joint_model(primary, [(secondary, op, spec)])

        alone = oracle_conjugate_gaussian(primary, [])
        fused = oracle_conjugate_gaussian(joint, [])
        field = joint.block_slice("field")
        assert np.allclose(fused.mean[field], alone.mean, rtol=0.0, atol=1e-8)
        assert np.allclose(fused.covariance[field, field], alone.covariance, rtol=0.0, atol=1e-8)

        coupled = assemble_joint_model(primary, [(secondary, op, replace(spec, alpha_value=1.0))])
        assert not np.allclose(oracle_conjugate_gaussian(coupled, []).mean[field], alone.mean, atol=1e-3)

    def test_free_alpha_is_scaled(self):
        """A bound alpha keeps the shared rows apart and adds an identity-transformed hyperparameter."""
        primary = primary_model(2)
        op = build_areal_operator(2, [Region("r", (0, 1))])
        spec = SharedPredictorSpec(field_design=sp.identity(2, format="csr"), entry_index=np.array([0]),
                                   alpha_binding="alpha")
        joint = assemble_joint_model(primary, [(gaussian_block([0.5], sp.csr_matrix((1, 2))), op, spec)])
        block = joint.observation_blocks[1]
        alpha = joint.hyper_layout.get("alpha")
        assert block.scale_binding == "alpha"
        assert alpha.transform == Transform.IDENTITY
        assert alpha.initial == 1.0
        assert np.allclose(block.design(3.0).toarray(), [[1.5, 1.5]])

    def test_dimension_mismatch(self):
        primary = primary_model(4)
        op = build_areal_operator(3, [Region("r", (0, 1))])
        spec = SharedPredictorSpec(field_design=sp.identity(4, format="csr"), entry_index=np.array([0]))
        with pytest.raises(ModelValidationError):
            assemble_joint_model(primary, [(gaussian_block([0.5], sp.csr_matrix((1, 4))), op, spec)])
