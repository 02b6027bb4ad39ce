#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 30, 2025 10:12:55$"

import logging
import sys

from recinla.engine.infrastructure.container import Container
from recinla.engine.infrastructure.logging_config import setup_logging
from recinla.engine.infrastructure.sentry_config import init_sentry
from recinla.engine.interface_adapter.cli import commands

logger = logging.getLogger(__name__)


def main(argv=None) -> int:
    """Command-line entry: logging, error tracking, container, then the command."""
    setup_logging()
    init_sentry()

    container = Container()
    container.wire(modules=[commands])
    logger.info("Dependency injection container initialized")
    try:
        return commands.main(argv)
    finally:
        container.unwire()


if __name__ == "__main__":
    sys.exit(main())
