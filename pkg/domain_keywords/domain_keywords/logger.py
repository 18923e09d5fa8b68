"""Keyword extraction logger initialisation"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from .constants import LOG_DIRECTORY_ENV_VAR

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def logger(
    module: str,
    file_count: int = 20,
    max_size: int = 100_000,
    stream_only: bool = False,
) -> logging.Logger:
    """Builds (or fetches) a named logger.

    Records always go to stderr so stdout stays reserved for data. When the
    log directory environment variable is set, records are also written to a
    rotating file named after the module.

    Args:
        module (str): The logger name, also used as the log file name
        file_count (int, optional): Rotated files to keep. Defaults to 20.
        max_size (int, optional): Bytes per file before rotating. Defaults to 100_000.
        stream_only (bool, optional): Skip the file handler. Defaults to False.

    Returns:
        logging.Logger: The configured logger
    """
    named_logger = logging.getLogger(module)

    if named_logger.handlers:
        return named_logger

    named_logger.setLevel(logging.DEBUG)
    named_logger.propagate = False
    formatter = logging.Formatter(LOG_FORMAT)

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(logging.WARNING)
    stream_handler.setFormatter(formatter)
    named_logger.addHandler(stream_handler)

    log_directory = os.environ.get(LOG_DIRECTORY_ENV_VAR)

    if log_directory and not stream_only:
        os.makedirs(log_directory, exist_ok=True)
        file_handler = RotatingFileHandler(
            os.path.join(log_directory, f"{module}.log"),
            maxBytes=max_size,
            backupCount=file_count,
            encoding="utf-8",
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        named_logger.addHandler(file_handler)

    return named_logger


keyword_logger = logger("domain_keywords", file_count=50)
