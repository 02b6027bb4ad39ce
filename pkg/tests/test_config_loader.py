#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Dec 01, 2025 13:51:40$"

import pytest
from pydantic import ValidationError

from recinla.engine.application.dto.experiment import EngineOptions, ExperimentConfig, PartitionRule
from recinla.engine.infrastructure.config import EngineConfig
from recinla.engine.infrastructure.utils.config_loader import load_experiment_config, parse_config_text


class TestParseConfigText:
    """JSON experiment configs with line comments."""

    def test_pure_json(self):
        assert parse_config_text('{"seed": 3}') == {"seed": 3}

    def test_line_comments(self):
        """Whole-line // and # comments are dropped."""
        text = '// quick run\n{\n  # small lattice\n  "seed": 3,\n  "name": "a//b"\n}'
        assert parse_config_text(text) == {"seed": 3, "name": "a//b"}

    @pytest.mark.parametrize("text", ["", "   \n", "[1, 2]", "{seed: 3}"])
    def test_rejected(self, text):
        with pytest.raises(ValueError):
            parse_config_text(text)


class TestLoadExperimentConfig:

    def test_defaults_without_file(self):
        config = load_experiment_config()
        assert config == ExperimentConfig()
        assert config.methods == ["full", "recursive", "consensus"]

    def test_file_and_overrides(self, tmp_path):
        """Command-line values win over the file."""
        path = tmp_path / "exp.json"
        path.write_text('{"name": "st", "seed": 1, "simulation": {"kind": "categorical"}}')
        config = load_experiment_config(path, seed=9, out=str(tmp_path / "out"), partitions="random:4")
        assert config.name == "st"
        assert config.seed == 9
        assert config.output_dir == str(tmp_path / "out")
        assert config.simulation.kind == "categorical"
        assert config.partitions == PartitionRule(kind="random", count=4)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError):
            load_experiment_config(tmp_path / "absent.json")

    def test_schema_violation(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"methods": ["full", "full"]}')
        with pytest.raises(ValidationError):
            load_experiment_config(path)

    def test_nested_validation(self, tmp_path):
        """Sizes are checked inside the simulation section."""
        path = tmp_path / "bad.json"
        path.write_text('{"simulation": {"spatial_fusion": {"nrow": 3, "ncol": 3, "n_points": 20}}}')
        with pytest.raises(ValidationError):
            load_experiment_config(path)


class TestPartitionRule:

    @pytest.mark.parametrize("text, expected", [
        ("time:10", PartitionRule(kind="time_block", size=10)),
        ("rows:6", PartitionRule(kind="row_range", count=6)),
        ("random:4", PartitionRule(kind="random", count=4)),
    ])
    def test_parse(self, text, expected):
        assert PartitionRule.parse(text) == expected

    @pytest.mark.parametrize("text", ["time", "time:x", "chunks:3", "rows:-1"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            PartitionRule.parse(text)

    def test_kind_needs_its_parameter(self):
        with pytest.raises(ValidationError):
            PartitionRule(kind="row_range")


class TestEngineOptions:

    def test_apply_overrides_only_set_fields(self):
        base = EngineConfig(strategy="auto", step_size=1.0, newton_tol=1e-8)
        applied = EngineOptions(strategy="ccd_lite", step_size=0.5).apply(base)
        assert applied.strategy == "ccd_lite"
        assert applied.step_size == 0.5
        assert applied.newton_tol == 1e-8
        assert base.step_size == 1.0
