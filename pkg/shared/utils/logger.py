"""
Logger utilities for the Hamming CS project.
"""

import logging
import sys
from typing import Optional

from shared.core.config import settings


def get_logger(name: str, level: Optional[int] = None) -> logging.Logger:
    """
    Get a logger instance with the specified name.

    Standard output carries machine-readable results only, so the handler
    writes to standard error.

    Args:
        name: The logger name
        level: Optional logging level (defaults to settings.LOG_LEVEL)

    Returns:
        logging.Logger: Configured logger instance
    """
    logger = logging.getLogger(name)

    logger.setLevel(level if level is not None else settings.LOG_LEVEL)

    # Only add handler if none exists
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger
