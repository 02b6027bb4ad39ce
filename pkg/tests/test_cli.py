#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Dec 01, 2025 14:27:02$"

import json

import numpy as np
import pytest

from recinla import main as entry
from recinla.engine.application.use_case.experiment import ExperimentRunner
from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.domain.model.errors import FactorizationError
from recinla.engine.infrastructure.container import Container
from recinla.engine.interface_adapter.cli import commands

SMALL = {
    "name": "cli",
    "simulation": {"kind": "categorical", "categorical": {"n_per_level_a": 4, "n_per_level_b": 4}},
    "seed": 2,
}


@pytest.fixture
def wired():
    container = Container()
    container.wire(modules=[commands])
    yield container
    container.unwire()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.json"
    path.write_text("// categorical smoke run\n" + json.dumps(SMALL))
    return path


class TestCommands:

    def test_oracle(self, wired, capsys):
        """The oracle command prints the engine-vs-closed-form gaps."""
        assert commands.main(["oracle", "--seed", "1"]) == commands.EXIT_OK
        result = json.loads(capsys.readouterr().out)
        assert result["seed"] == 1
        assert result["log_evidence_diff"] < 1e-7

    def test_simulate_writes_dataset(self, wired, config_file, tmp_path, capsys):
        out = tmp_path / "sim"
        assert commands.main(["simulate", "--config", str(config_file), "--out", str(out)]) == commands.EXIT_OK
        assert (out / "dataset" / "observations.csv").exists()
        assert json.loads(capsys.readouterr().out)["dataset"] == "categorical"

    def test_fit_on_stored_dataset(self, wired, config_file, tmp_path, capsys):
        """fit reads a simulated dataset back and runs only the full method."""
        out = tmp_path / "run"
        commands.main(["simulate", "--config", str(config_file), "--out", str(out)])
        capsys.readouterr()
        code = commands.main([
            "fit", "--config", str(config_file), "--data", str(out / "dataset"),
            "--partitions", "rows:2", "--out", str(out),
        ])
        assert code == commands.EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["full"] is not None
        assert report["recursive"] is None
        assert (out / "report.json").exists()
        run_log = (out / "run.log").read_text()
        assert "Fit complete" in run_log
        assert (out / "flagged_points.log").exists()

    def test_bad_partition_rule(self, wired, config_file):
        assert commands.main(["fit", "--config", str(config_file), "--partitions", "chunks:3"]) == commands.EXIT_VALIDATION

    def test_bad_config(self, wired, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert commands.main(["simulate", "--config", str(path)]) == commands.EXIT_VALIDATION

    def test_numerical_failure(self, wired, config_file, tmp_path, monkeypatch):
        """When every requested method fails the exit code is 3."""
        def fail(*args, **kwargs):
            raise FactorizationError("matrix is singular")

        monkeypatch.setattr(LaplaceEngine, "fit", fail)
        code = commands.main(["fit", "--config", str(config_file), "--out", str(tmp_path / "f"),
                              "--partitions", "rows:2"])
        assert code == commands.EXIT_NUMERICAL

    def test_linalg_error_is_numerical(self, wired, config_file, tmp_path, monkeypatch):
        """A raw LinAlgError from numpy exits 3, not as invalid input."""
        def singular(*args, **kwargs):
            raise np.linalg.LinAlgError("Singular matrix")

        monkeypatch.setattr(ExperimentRunner, "run_experiment", singular)
        code = commands.main(["compare", "--config", str(config_file), "--out", str(tmp_path / "c")])
        assert code == commands.EXIT_NUMERICAL
        assert (tmp_path / "c" / "run.log").exists()

    def test_missing_command(self):
        with pytest.raises(SystemExit):
            commands.build_parser().parse_args([])


class TestEntryPoint:

    def test_main_wires_and_runs(self, restore_root_logger, capsys):
        """The console entry sets up logging and the container before dispatching."""
        assert entry.main(["oracle", "--seed", "0", "--constrained"]) == 0
        assert json.loads(capsys.readouterr().out)["constrained"] is True
