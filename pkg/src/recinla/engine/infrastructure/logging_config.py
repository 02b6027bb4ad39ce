#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 22, 2025 12:01:36$"

import logging
import os
from contextlib import contextmanager
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Iterator

from recinla.engine.infrastructure.trace_logger import get_flagged_point_logger

DETAILED_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'
SIMPLE_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

RUN_LOG_FILE = "run.log"

# chatty below WARNING and never about the numerics
_QUIET_LOGGERS = ("urllib3", "sentry_sdk", "matplotlib")


def setup_logging(
    log_level: str = None,
    log_file: str = None,
    log_dir: str = None,
) -> Path:
    """
    Configure process-wide logging: a rotating DEBUG file and a console.

    numpy and scipy warnings (overflow in exp, ill-conditioned solves) are
    routed into the log. The flagged point log is opened in the same
    directory.

    Args:
        log_level: Console level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Log file name (default: recinla.log)
        log_dir: Directory for log files (default: logs/)

    Returns:
        Path of the main log file
    """
    log_level = log_level or os.getenv("LOG_LEVEL", "INFO")
    log_file = log_file or os.getenv("LOG_FILE", "recinla.log")
    log_dir = log_dir or os.getenv("LOG_DIR", "logs")

    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)
    log_file_path = log_path / log_file

    # Newton iterations log at DEBUG, so the file keeps everything
    file_handler = RotatingFileHandler(
        log_file_path,
        maxBytes=10 * 1024 * 1024,  # 10MB
        backupCount=5,
        encoding='utf-8'
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(fmt=DETAILED_FORMAT, datefmt=DATE_FORMAT))

    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, log_level.upper()))
    console_handler.setFormatter(logging.Formatter(fmt=SIMPLE_FORMAT, datefmt=DATE_FORMAT))

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    root_logger.handlers.clear()
    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)

    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
    logging.captureWarnings(True)

    flagged = get_flagged_point_logger(log_dir=str(log_path))

    root_logger.info("=" * 80)
    root_logger.info(
        f"Logging initialized - Level: {log_level}, File: {log_file_path}, "
        f"Flagged points: {flagged.log_file_path}"
    )
    root_logger.info("=" * 80)
    return log_file_path


@contextmanager
def run_log(out_dir: str, log_file: str = RUN_LOG_FILE) -> Iterator[Path]:
    """
    Per-run copy of the log inside an experiment output directory.

    While the block runs, every record down to DEBUG is also written to
    <out_dir>/run.log and flagged points to <out_dir>/flagged_points.log,
    next to the report they belong to. Both files start empty.

    Yields:
        Path of the run log
    """
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    run_path = path / log_file

    handler = logging.FileHandler(run_path, mode="w", encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(fmt=DETAILED_FORMAT, datefmt=DATE_FORMAT))
    root_logger = logging.getLogger()
    previous_level = root_logger.level
    root_logger.setLevel(logging.DEBUG)
    root_logger.addHandler(handler)

    flagged = get_flagged_point_logger()
    flagged_handler = flagged.mirror_to(path / flagged.log_file_path.name)
    try:
        yield run_path
    finally:
        root_logger.removeHandler(handler)
        handler.close()
        root_logger.setLevel(previous_level)
        flagged.detach(flagged_handler)
