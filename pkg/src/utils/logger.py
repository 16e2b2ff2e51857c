"""Logging setup shared by the solvers and the CLI."""

import logging
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
ROOT_NAME = "matroidkit"

_configured = False


def setup_logger(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the package root logger.

    Safe to call more than once; later calls replace the handlers so the
    CLI can reconfigure after reading the config file.

    Args:
        level: Level name (DEBUG, INFO, WARNING, ERROR). Defaults to WARNING.
        log_file: Optional path for an additional file handler.

    Returns:
        The configured root logger of the package
    """
    global _configured

    root = logging.getLogger(ROOT_NAME)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    root.addHandler(stream)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    root.setLevel(getattr(logging, (level or "WARNING").upper(), logging.WARNING))
    root.propagate = False
    _configured = True
    return root


def get_logger(name: str) -> logging.Logger:
    """
    Get a child logger of the package root.

    Args:
        name: Usually ``__name__`` of the calling module

    Returns:
        Logger named ``matroidkit.<name>``
    """
    if not _configured:
        setup_logger()
    if name.startswith("src."):
        name = name[4:]
    return logging.getLogger(f"{ROOT_NAME}.{name}")
