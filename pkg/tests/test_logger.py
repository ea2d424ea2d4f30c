"""
Tests for the logger configuration.
"""
import logging

from rich.progress import Progress

from inverse_square_oscillator.utils import logger as logger_module


def test_level_from_environment(monkeypatch):
    """Test that ISQ_LOG_LEVEL sets the package level and bad names fall back to INFO."""
    monkeypatch.setenv("ISQ_LOG_LEVEL", "debug")
    assert logger_module.setup_logger("isq_test_env").level == logging.DEBUG
    monkeypatch.setenv("ISQ_LOG_LEVEL", "chatty")
    assert logger_module.setup_logger("isq_test_bad").level == logging.INFO


def test_explicit_level_wins(monkeypatch):
    monkeypatch.setenv("ISQ_LOG_LEVEL", "DEBUG")
    assert logger_module.setup_logger("isq_test_explicit", logging.WARNING).level == logging.WARNING


def test_set_level():
    """Test raising and restoring the package logger level."""
    before = logger_module.logger.level
    try:
        logger_module.set_level("DEBUG")
        assert logger_module.logger.isEnabledFor(logging.DEBUG)
    finally:
        logger_module.set_level(before)


def test_progress_bar():
    with logger_module.create_progress_bar(transient=True) as progress:
        assert isinstance(progress, Progress)
        task = progress.add_task("Evaluating eigenstates", total=3)
        progress.update(task, advance=3)
        assert progress.tasks[0].finished
