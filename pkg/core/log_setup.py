"""
Logging setup shared by the command line driver and the utility scripts.
"""

import os
import logging

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_FILE = "qpk.log"


def setup_file_logging(log_dir="logs", level="INFO"):
    """
    Attach a file handler writing to <log_dir>/qpk.log on the root logger.

    Args:
        log_dir (str): Directory for log files, created if missing
        level (str): Logging level name

    Returns:
        str: Path of the log file
    """
    os.makedirs(log_dir, exist_ok=True)
    path = os.path.join(log_dir, LOG_FILE)

    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in root.handlers:
        if isinstance(handler, logging.FileHandler) and handler.baseFilename == os.path.abspath(path):
            return path

    file_handler = logging.FileHandler(path)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(file_handler)
    return path


def quiet_console():
    """Raise console handlers to WARNING so reports stay clean on stdout/stderr."""
    for handler in logging.getLogger().handlers:
        if not isinstance(handler, logging.FileHandler):
            handler.setLevel(logging.WARNING)
