#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Dec 02, 2025 10:36:48$"

import logging

from recinla.engine.infrastructure.logging_config import run_log, setup_logging
from recinla.engine.infrastructure.trace_logger import get_flagged_point_logger


class TestRunLog:
    """Per-run log files next to the report."""

    def test_records_land_in_output_dir(self, tmp_path):
        """DEBUG records and flagged points of the block are copied, later ones are not."""
        log = logging.getLogger("recinla.engine.run_log_test")
        out = tmp_path / "experiment"
        with run_log(str(out)) as path:
            log.debug("newton iteration detail")
            get_flagged_point_logger().log_drift(2, 1.5, 0.4)
        log.warning("after the run")
        get_flagged_point_logger().log_drift(3, 0.1, 0.0)

        text = path.read_text()
        assert path == out / "run.log"
        assert "newton iteration detail" in text
        assert "after the run" not in text
        flagged = (out / "flagged_points.log").read_text()
        assert "step=2 reason=drift" in flagged
        assert "step=3" not in flagged

    def test_handlers_and_level_restored(self, tmp_path):
        root = logging.getLogger()
        handlers, level = root.handlers[:], root.level
        flagged = get_flagged_point_logger()
        flagged_handlers = flagged.logger.handlers[:]
        with run_log(str(tmp_path)):
            assert len(root.handlers) == len(handlers) + 1
            assert root.level == logging.DEBUG
        assert root.handlers == handlers
        assert root.level == level
        assert flagged.logger.handlers == flagged_handlers

    def test_handler_removed_when_block_raises(self, tmp_path):
        root = logging.getLogger()
        handlers = root.handlers[:]
        try:
            with run_log(str(tmp_path)):
                raise RuntimeError("factorization blew up")
        except RuntimeError:
            pass
        assert root.handlers == handlers


class TestSetupLogging:

    def test_main_and_flagged_logs_share_directory(self, tmp_path, restore_root_logger):
        log_dir = tmp_path / "logs"
        path = setup_logging("WARNING", "main.log", str(log_dir))
        assert path == log_dir / "main.log"
        assert get_flagged_point_logger().log_file_path.parent == log_dir

        logging.getLogger("recinla.engine.setup_test").debug("kept in the file only")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "kept in the file only" in path.read_text()
