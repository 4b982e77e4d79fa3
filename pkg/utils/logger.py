"""Logging for the toolkit: stderr console output and an optional detailed log file."""
import logging
import sys
from pathlib import Path
from typing import Optional

from config import LOG_FILE, LOG_LEVEL

DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
CONSOLE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'


def _configured(handler: logging.Handler, level: int, fmt: str) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt, datefmt=DATE_FORMAT))
    return handler


def setup_logger(
    name: str = __name__,
    log_level: int = LOG_LEVEL,
    log_file: Optional[Path] = LOG_FILE
) -> logging.Logger:
    """
    Logger writing `log_level` and up to stderr, keeping stdout for results.

    With `log_file` set, DEBUG records also go to that file with the calling
    function and line. A name that already has handlers is returned as is.

    Args:
        name: Logger name (typically __name__)
        log_level: Console level (default: LOG_LEVEL)
        log_file: Optional log file (default: LOG_FILE)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    logger.setLevel(min(log_level, logging.DEBUG) if log_file else log_level)
    logger.addHandler(_configured(logging.StreamHandler(sys.stderr), log_level, CONSOLE_FORMAT))
    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.addHandler(_configured(logging.FileHandler(log_file, encoding='utf-8'), logging.DEBUG, FILE_FORMAT))
    return logger
