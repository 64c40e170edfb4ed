import logging
import os
import sys
from typing import Optional

from colorama import Fore, Style, init
from dotenv import load_dotenv

init(autoreset=True)
load_dotenv()

_LEVEL_COLORS = {
    logging.DEBUG: Fore.CYAN,
    logging.INFO: Fore.GREEN,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.MAGENTA,
}

_ROOT_NAME = "fss"
_configured = False


class ColorFormatter(logging.Formatter):
    """Colors the level name the way the validation scripts color their output."""

    def format(self, record: logging.LogRecord) -> str:
        color = _LEVEL_COLORS.get(record.levelno, "")
        record.levelname_colored = f"{color}{record.levelname:<7}{Style.RESET_ALL}"
        return super().format(record)


def _configure(level: Optional[str] = None) -> None:
    global _configured
    root = logging.getLogger(_ROOT_NAME)
    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(ColorFormatter("%(levelname_colored)s %(name)s: %(message)s"))
        root.addHandler(handler)
        root.propagate = False
        _configured = True
        root.setLevel(os.getenv("FSS_LOG_LEVEL", "INFO").upper())
    if level is not None:
        root.setLevel(level.upper())


def set_level(level: str) -> None:
    _configure(level)


def get_logger(name: str) -> logging.Logger:
    """
    Returns a logger under the ``fss`` hierarchy.

    Args:
        name: Usually ``__name__`` of the calling module.
    """
    _configure()
    if not name.startswith(_ROOT_NAME):
        name = f"{_ROOT_NAME}.{name}"
    return logging.getLogger(name)
