#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 25, 2025 12:09:13$"

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Sequence


class FlaggedPointLogger:
    """
    Dedicated logger for flagged support points.

    Records every support point whose Newton iteration did not converge,
    whose factorization failed, or whose recursion raised a drift flag,
    so that problem configurations can be inspected after a run.
    """

    def __init__(
        self,
        log_file: str = None,
        log_dir: str = None,
    ):
        """
        Initialize flagged point logger.

        Args:
            log_file: Log file name (default: flagged_points.log)
            log_dir: Directory for log files (default: logs/)
        """
        log_file = log_file or os.getenv("FLAGGED_POINTS_LOG_FILE", "flagged_points.log")
        log_dir = log_dir or os.getenv("LOG_DIR", "logs")

        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)

        self.log_file_path = log_path / log_file

        self.logger = logging.getLogger("flagged_points")
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False  # Don't propagate to root logger

        self.logger.handlers.clear()

        # File handler with rotation (max 5MB, keep 3 backups)
        file_handler = RotatingFileHandler(
            self.log_file_path,
            maxBytes=5 * 1024 * 1024,
            backupCount=3,
            encoding='utf-8'
        )

        formatter = logging.Formatter(
            fmt='%(asctime)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(formatter)

        self.logger.addHandler(file_handler)

    def log_flagged_point(self, theta: Sequence[float], reason: str, step: int = 0, index: int = None):
        """
        Log one flagged support point.

        Args:
            theta: Internal-scale hyperparameter vector of the point
            reason: non_converged, factorization_failed or drift
            step: Partition counter (0 for a plain fit)
            index: Support point index, when known
        """
        coords = ", ".join(f"{float(v):.6g}" for v in theta)
        self.logger.info(f"step={step} point={index} reason={reason} theta=[{coords}]")

    def log_drift(self, step: int, mode_shift: float, boundary_mass: float):
        self.logger.info(
            f"step={step} reason=drift mode_shift={mode_shift:.4g} boundary_mass={boundary_mass:.4g}"
        )

    def mirror_to(self, path: Path) -> logging.Handler:
        """Also write flagged points to path (truncated) until detach."""
        handler = logging.FileHandler(path, mode="w", encoding="utf-8")
        handler.setFormatter(self.logger.handlers[0].formatter)
        self.logger.addHandler(handler)
        return handler

    def detach(self, handler: logging.Handler):
        self.logger.removeHandler(handler)
        handler.close()


# Global instance
_flagged_point_logger = None


def get_flagged_point_logger(log_dir: str = None) -> FlaggedPointLogger:
    """
    Get the global flagged point logger instance.

    Args:
        log_dir: Reopen the log in this directory (used by setup_logging)

    Returns:
        FlaggedPointLogger instance
    """
    global _flagged_point_logger
    if _flagged_point_logger is None or (
        log_dir is not None and _flagged_point_logger.log_file_path.parent != Path(log_dir)
    ):
        _flagged_point_logger = FlaggedPointLogger(log_dir=log_dir)
    return _flagged_point_logger
