"""
Logger configuration for the inverse-square oscillator tools.
"""
import logging
import os
from typing import Union

from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)

LOGGER_NAME = "inverse_square_oscillator"
ENV_LOG_LEVEL = "ISQ_LOG_LEVEL"

console = Console()


def _resolve_level(level: Union[int, str, None]) -> int:
    """Map a level name or number onto a logging level; unknown names give INFO."""
    if level is None:
        return logging.INFO
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(level.strip().upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def setup_logger(name: str = LOGGER_NAME, level: Union[int, str, None] = None) -> logging.Logger:
    """
    Configure and return the package logger with rich formatting.

    Only the package logger is raised to the requested level; third-party
    loggers stay at WARNING. numpy and scipy warnings are routed through
    logging so they show up in the same stream.

    Args:
        name (str): Logger name
        level: Level number or name; defaults to ISQ_LOG_LEVEL, then INFO

    Returns:
        logging.Logger: Configured logger
    """
    logging.basicConfig(
        level=logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, console=console, show_path=False)]
    )
    logging.captureWarnings(True)

    log = logging.getLogger(name)
    log.setLevel(_resolve_level(level if level is not None else os.getenv(ENV_LOG_LEVEL)))
    return log


def set_level(level: Union[int, str, None]):
    """Change the package log level after start-up (e.g. from --verbose)."""
    logger.setLevel(_resolve_level(level))


def create_progress_bar(transient: bool = True) -> Progress:
    """
    Create a rich progress bar for sweeps over grid points, states or times.

    Returns:
        Progress: Rich progress bar
    """
    return Progress(
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TaskProgressColumn(),
        TimeElapsedColumn(),
        TimeRemainingColumn(),
        console=console,
        transient=transient,
    )


logger = setup_logger()
