#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 22, 2025$"

import logging
import os
import socket
from typing import Optional
from urllib.parse import urlparse

import sentry_sdk
from sentry_sdk.integrations.logging import LoggingIntegration

logger = logging.getLogger(__name__)


def _test_sentry_connection(dsn: str, timeout: int = 3) -> bool:
    """
    Test if Sentry server is reachable.

    Args:
        dsn: Sentry DSN to test
        timeout: Connection timeout in seconds

    Returns:
        True if server is reachable, False otherwise
    """
    try:
        parsed = urlparse(dsn)
        host = parsed.hostname
        port = parsed.port or (443 if parsed.scheme == "https" else 80)
        with socket.create_connection((host, port), timeout=timeout):
            return True
    except Exception as e:
        logger.debug(f"Sentry connection test failed: {e}")
        return False


def init_sentry() -> bool:
    """
    Initialize Sentry SDK for error tracking of long experiment runs.

    Configuration is loaded from environment variables:
    - SENTRY_DSN: Your Sentry DSN (required)
    - SENTRY_ENVIRONMENT: Environment name (default: development)
    - SENTRY_TRACES_SAMPLE_RATE: Fraction of runs to trace (0.0 to 1.0)

    The CLI keeps working without error tracking when the DSN is missing
    or the server is unreachable.

    Returns:
        True when Sentry was initialized
    """
    sentry_dsn: Optional[str] = os.getenv("SENTRY_DSN")
    if not sentry_dsn or sentry_dsn.startswith("http://YOUR_PUBLIC_KEY"):
        logger.debug("Sentry DSN not configured, running without error tracking")
        return False

    logger.debug("Testing connection to Sentry server...")
    if not _test_sentry_connection(sentry_dsn):
        logger.info("Sentry server is not available, running without error tracking")
        return False

    environment: str = os.getenv("SENTRY_ENVIRONMENT", "development")
    traces_sample_rate: float = float(os.getenv("SENTRY_TRACES_SAMPLE_RATE", "0.0"))

    logging_integration = LoggingIntegration(
        level=logging.INFO,        # breadcrumbs
        event_level=logging.ERROR  # events
    )

    try:
        logging.getLogger("sentry_sdk").setLevel(logging.ERROR)
        sentry_sdk.init(
            dsn=sentry_dsn,
            environment=environment,
            traces_sample_rate=traces_sample_rate,
            integrations=[logging_integration],
            send_default_pii=False,
            attach_stacktrace=True,
            shutdown_timeout=2,
        )
        logger.info(f"Sentry initialized successfully - Environment: {environment}")
        return True
    except Exception as e:
        logger.warning(f"Failed to initialize Sentry: {e}. Continuing without error tracking.")
        return False


def capture_exception(error: Exception, **extra_context) -> None:
    """
    Send an exception to Sentry with extra context.

    Does nothing when Sentry is not initialized.
    """
    if not sentry_sdk.get_client().is_active():
        return

    with sentry_sdk.new_scope() as scope:
        for key, value in extra_context.items():
            scope.set_extra(key, value)
        sentry_sdk.capture_exception(error)


def set_context(context_name: str, context_data: dict) -> None:
    """Attach experiment context (name, seed, methods) to later events."""
    if not sentry_sdk.get_client().is_active():
        return
    sentry_sdk.set_context(context_name, context_data)
