import logging
import sys

from config import get_log_level

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class Logger(logging.getLoggerClass()):
    """Logger writing to stderr, so that reports printed to stdout stay clean.

    Arguments:
        name (str): Name of the logger, usually the module name.
        level (str | None): Log level, SIM_LOG_LEVEL is used when not given.
    """

    def __init__(self, name: str = "creditsim", level: str | None = None):
        super().__init__(name)
        self.setLevel(level or get_log_level())
        self.stdout_handler = logging.StreamHandler(sys.stderr)
        self.stdout_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        self.addHandler(self.stdout_handler)
