"""Process-wide logging for the compiler CLI and benchmark workers.

Diagrams, meshes and tables go to stdout, so every log record goes to stderr
and, with LOG_TO_FILE=true, to a rotating file as well. The layer search logs
one line per ordering and layer; LOG_SEARCH_LEVEL sets its loggers apart from
the rest so a long benchmark can run at INFO without the search noise.
"""
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

DEFAULT_LEVEL = "INFO"
DEFAULT_LOG_FILE = os.path.join("~", ".topols", "topols.log")
LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
MAX_LOG_BYTES = 10 * 1024 * 1024
BACKUP_COUNT = 5

# loggers of the per-layer search and routing
SEARCH_LOGGERS = ("topols.app.embed",)


def _level(name: Optional[str], fallback: str) -> int:
    if not name:
        name = fallback
    numeric = getattr(logging, name.upper(), None)
    if not isinstance(numeric, int):
        print(f"Invalid log level: {name}, defaulting to {fallback}", file=sys.stderr)
        numeric = getattr(logging, fallback)
    return numeric


def configure_logging(app_name: str = "topols", log_level: Optional[str] = None) -> logging.Logger:
    """Install the stderr handler, and the rotating file handler when enabled.

    log_level overrides LOG_LEVEL; both default to INFO. LOG_FILE_PATH names the
    rotating file. Calling it again replaces the handlers of the previous call.
    """
    numeric_level = _level(log_level or os.environ.get("LOG_LEVEL"), DEFAULT_LEVEL)
    log_to_file = os.environ.get("LOG_TO_FILE", "false").lower() == "true"
    log_file_path = os.path.expanduser(os.environ.get("LOG_FILE_PATH", DEFAULT_LOG_FILE))

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_to_file:
        os.makedirs(os.path.dirname(log_file_path) or ".", exist_ok=True)
        file_handler = RotatingFileHandler(log_file_path, maxBytes=MAX_LOG_BYTES, backupCount=BACKUP_COUNT)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    search_level = os.environ.get("LOG_SEARCH_LEVEL")
    for name in SEARCH_LOGGERS:
        # NOTSET defers to the root level
        logging.getLogger(name).setLevel(_level(search_level, DEFAULT_LEVEL) if search_level else logging.NOTSET)

    logger = logging.getLogger(app_name)
    logger.debug(f"Logging configured at {logging.getLevelName(numeric_level)}, file {log_file_path if log_to_file else 'off'}")
    return logger
