"""Logging for Speedscale.

Two rotating files under .speedscale/logs in the working directory:
speedscale.log for the solver modules and performance.log for one-line timing
records written by PerformanceTimer. Both are skipped when
logging.file_logging is off; console output goes to stderr.
"""

import logging
import sys
import time
from logging.handlers import RotatingFileHandler
from pathlib import Path
from types import TracebackType
from typing import Any

from . import config as settings

ROOT_LOGGER = "speedscale"
PERFORMANCE_LOGGER = "speedscale.performance"

_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}

_MAX_BYTES = 5 * 1024 * 1024
_BACKUPS = 3
_FILE_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"

_configured = False


def logs_dir() -> Path:
    return settings.SPEEDSCALE_HOME / "logs"


def _rotating(filename: str, level: int, fmt: str) -> logging.Handler:
    directory = logs_dir()
    directory.mkdir(parents=True, exist_ok=True)
    handler = RotatingFileHandler(
        directory / filename, maxBytes=_MAX_BYTES, backupCount=_BACKUPS, encoding="utf-8"
    )
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt, datefmt="%Y-%m-%d %H:%M:%S"))
    return handler


def _setup() -> None:
    """Attach handlers once per process, levels taken from the [logging] settings."""
    global _configured
    _configured = True

    config = settings.load_config().logging
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(logging.DEBUG)
    perf = logging.getLogger(PERFORMANCE_LOGGER)
    perf.setLevel(logging.INFO)
    perf.propagate = False
    if root.handlers:
        return

    if config.file_logging:
        level = _LEVELS.get(config.level.lower(), logging.INFO)
        root.addHandler(_rotating("speedscale.log", level, _FILE_FORMAT))
        perf.addHandler(_rotating("performance.log", logging.INFO, "%(asctime)s | %(message)s"))
    else:
        perf.addHandler(logging.NullHandler())

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(_LEVELS.get(config.console_level.lower(), logging.WARNING))
    console.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    root.addHandler(console)


def get_logger(name: str) -> logging.Logger:
    """Logger for one module, a child of the "speedscale" logger.

    Args:
        name: Module name, e.g. "oracle".

    Returns:
        The "speedscale.<name>" logger.
    """
    if not _configured:
        _setup()
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure_logging(verbose: bool = False) -> None:
    """Lower the console handler to debug when verbose."""
    if not _configured:
        _setup()
    if not verbose:
        return
    for handler in logging.getLogger(ROOT_LOGGER).handlers:
        if isinstance(handler, logging.StreamHandler) and handler.stream is sys.stderr:
            handler.setLevel(logging.DEBUG)


class PerformanceTimer:
    """Times a block and writes `op=... | duration_ms=... | key=value` to performance.log.

    Usage:
        with PerformanceTimer("preemptive", n=12, m=3) as timer:
            ...
            timer.add_metric("phases", 4)

    A block left by an exception is still logged, with error=<exception class>.
    """

    def __init__(self, operation: str, **metrics: Any):
        self.operation = operation
        self.metrics = metrics
        self.duration_ms: float | None = None
        self._start: float | None = None

    def __enter__(self) -> "PerformanceTimer":
        self._start = time.perf_counter()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: TracebackType | None,
    ) -> None:
        if self._start is None:
            return
        self.duration_ms = (time.perf_counter() - self._start) * 1000
        if exc_type is not None:
            self.metrics["error"] = exc_type.__name__

        if not _configured:
            _setup()
        parts = [f"op={self.operation}", f"duration_ms={self.duration_ms:.2f}"]
        parts += [f"{key}={value}" for key, value in self.metrics.items()]
        logging.getLogger(PERFORMANCE_LOGGER).info(" | ".join(parts))

    def add_metric(self, key: str, value: Any) -> None:
        self.metrics[key] = value
