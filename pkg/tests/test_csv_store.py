#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Dec 01, 2025 11:20:33$"

import json

import numpy as np
import pandas as pd
import pytest

from recinla.engine.application.dto.experiment import CategoricalConfig
from recinla.engine.application.use_case.fusion import build_areal_operator
from recinla.engine.application.use_case.simulation import simulate_categorical
from recinla.engine.domain.gmrf import build_ar1_precision
from recinla.engine.domain.model.approx import HyperMarginal, LatentMarginals, PosteriorSummary
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.fusion import Region
from recinla.engine.infrastructure.service.storage.csv_store import CsvResultStore


@pytest.fixture
def store() -> CsvResultStore:
    return CsvResultStore()


def summary() -> PosteriorSummary:
    grid = np.linspace(-3.0, 3.0, 4)
    latent = LatentMarginals(
        mean=np.array([0.1, -0.2]),
        sd=np.array([1.0, 0.5]),
        grid=np.vstack([grid, grid * 0.5]),
        density=np.full((2, 4), 0.25),
    )
    hyper = HyperMarginal(
        name="u_tau",
        internal_grid=grid,
        internal_density=np.full(4, 1 / 6),
        natural_grid=np.exp(grid),
        natural_density=np.full(4, 0.1),
        internal_mean=0.0,
        internal_sd=1.0,
        natural_mean=1.6,
        natural_mode=1.0,
    )
    return PosteriorSummary(latent, (hyper,), -12.5, method="full", metadata={"n_points": np.int64(9)})


class TestSummaryFiles:

    def test_plot_ready_tables(self, store, tmp_path):
        """One row per node with its grid, long-format hyper table, json header."""
        store.write_summary(summary(), tmp_path)
        latent = pd.read_csv(tmp_path / "latent_marginals.csv")
        assert list(latent.columns[:3]) == ["node", "mean", "sd"]
        assert len(latent) == 2
        assert "grid_3" in latent.columns and "density_3" in latent.columns

        hyper = pd.read_csv(tmp_path / "hyper_marginals.csv")
        assert set(hyper["name"]) == {"u_tau"}
        assert len(hyper) == 4

        header = json.loads((tmp_path / "summary.json").read_text())
        assert header["log_marginal_likelihood"] == -12.5
        assert header["hyperparameters"]["u_tau"]["natural_mode"] == 1.0
        assert header["metadata"]["n_points"] == 9

    def test_same_input_same_bytes(self, store, tmp_path):
        store.write_summary(summary(), tmp_path / "a")
        store.write_summary(summary(), tmp_path / "b")
        for name in ("latent_marginals.csv", "hyper_marginals.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestDatasetFiles:

    def test_dataset_read_back(self, store, tmp_path):
        data = simulate_categorical(CategoricalConfig(n_per_level_a=3, n_per_level_b=2), 1)
        store.write_dataset(data, tmp_path)
        back = CsvResultStore.read_dataset(tmp_path)
        assert back.kind == "categorical"
        assert back.meta["groups"] == [[0, 1, 2], [3], [4]]
        assert np.allclose(back.truth_vector("u_b"), data.truth_vector("u_b"))
        assert back.observations["source"].tolist() == data.observations["source"].tolist()


class TestTripletFiles:

    def test_matrix_triplets(self, store, tmp_path):
        """dim header plus lower-triangle row, col, value lines."""
        q = build_ar1_precision(5, 0.4, 2.0)
        path = tmp_path / "q.csv"
        store.write_matrix(q, path)
        assert path.read_text().splitlines()[0] == "dim=5"
        back = CsvResultStore.read_matrix(path)
        assert back.dim == 5
        assert np.array_equal(back.to_dense(), q.to_dense())

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("row,col,value\n0,0,1.0\n")
        with pytest.raises(ModelValidationError):
            CsvResultStore.read_matrix(path)

    def test_operator_header(self, store, tmp_path):
        op = build_areal_operator(4, [Region("a", (0, 1)), Region("b", (2, 3))])
        path = tmp_path / "op.csv"
        store.write_operator(op, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "dim=2x4"
        assert len(lines) == 2 + 4


class TestRegions:

    def test_membership_and_measures(self, tmp_path):
        """Measures default to member counts."""
        (tmp_path / "members.csv").write_text("region_id,site_index\nr1,0\nr1,1\nr2,5\n")
        (tmp_path / "measures.csv").write_text("region_id,measure\nr1,2.5\n")
        regions = CsvResultStore.read_regions(tmp_path / "members.csv", tmp_path / "measures.csv")
        assert [r.id for r in regions] == ["r1", "r2"]
        assert regions[0].member_points == (0, 1)
        assert regions[0].measure == 2.5
        assert regions[1].measure == 1.0

    def test_missing_columns(self, tmp_path):
        (tmp_path / "members.csv").write_text("region,site\nr1,0\n")
        with pytest.raises(ModelValidationError):
            CsvResultStore.read_regions(tmp_path / "members.csv")
