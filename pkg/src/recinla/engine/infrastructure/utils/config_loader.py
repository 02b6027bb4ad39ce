#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 29, 2025 17:34:09$"

import json
import logging
import re
from pathlib import Path
from typing import Any, Optional, Union

from recinla.engine.application.dto.experiment import ExperimentConfig, PartitionRule

logger = logging.getLogger(__name__)

_LINE_COMMENT = re.compile(r'^\s*(//|#).*$', re.MULTILINE)


def parse_config_text(text: str) -> dict[str, Any]:
    """
    Parse a JSON experiment config, allowing whole-line // or # comments.

    Examples:
        >>> parse_config_text('{"seed": 3}')
        {'seed': 3}

        >>> parse_config_text('// quick run\\n{"seed": 3}')
        {'seed': 3}

    Raises:
        ValueError: If the text is empty or not a JSON object
    """
    if not text or not text.strip():
        raise ValueError("experiment config is empty")
    try:
        data = json.loads(_LINE_COMMENT.sub("", text))
    except json.JSONDecodeError as e:
        raise ValueError(f"experiment config is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValueError("experiment config must be a JSON object")
    return data


def load_experiment_config(
    path: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    partitions: Optional[str] = None,
) -> ExperimentConfig:
    """
    Build an ExperimentConfig from an optional JSON file and command-line overrides.

    Args:
        path: JSON config file; defaults apply when omitted
        seed: Overrides the config seed
        out: Overrides the output directory
        partitions: Partition rule such as time:10, rows:6 or random:4

    Raises:
        ValueError: On unreadable JSON or a bad partition rule
        pydantic.ValidationError: On schema violations
    """
    data: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ValueError(f"config file not found: {path}")
        data = parse_config_text(path.read_text(encoding="utf-8"))
        logger.info(f"Loaded experiment config from {path}")
    if seed is not None:
        data["seed"] = int(seed)
    if out is not None:
        data["output_dir"] = str(out)
    if partitions is not None:
        data["partitions"] = PartitionRule.parse(partitions).model_dump()
    return ExperimentConfig.model_validate(data)
