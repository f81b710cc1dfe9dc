#!/usr/bin/env python3
"""
Test script to verify logging functionality
"""

import logging

from app.logger_config import ROOT_LOGGER, get_logger, setup_logger


def test_logging(tmp_path):
    """Test logging functionality."""
    log_file = tmp_path / "logs" / "umr.log"

    # Set up logger
    logger = setup_logger("umr_test_file", "DEBUG", str(log_file))

    # Test different log levels
    logger.debug("This is a debug message")
    logger.info("This is an info message")
    logger.warning("This is a warning message")

    # Test exception logging
    try:
        raise ValueError("This is a test exception")
    except Exception as e:
        logger.error(f"Caught exception: {e}", exc_info=True)

    for handler in logger.handlers:
        handler.flush()
    text = log_file.read_text(encoding="utf-8")
    assert "DEBUG - umr_test_file" in text
    assert "This is a warning message" in text
    assert "Traceback" in text and "ValueError: This is a test exception" in text


def test_setup_does_not_duplicate_handlers():
    first = setup_logger("umr_test_twice", "INFO")
    second = setup_logger("umr_test_twice", "WARNING")
    assert first is second
    assert len(second.handlers) == 1
    assert second.level == logging.WARNING
    assert second.handlers[0].level == logging.WARNING


def test_repeat_setup_keeps_file_handler_at_debug(tmp_path):
    log_file = tmp_path / "umr.log"
    setup_logger("umr_test_repeat_file", "INFO", str(log_file))
    logger = setup_logger("umr_test_repeat_file", "ERROR")
    levels = {type(h).__name__: h.level for h in logger.handlers}
    assert levels == {"StreamHandler": logging.ERROR, "FileHandler": logging.DEBUG}
    for handler in logger.handlers:
        handler.close()


def test_console_handler_only_without_file():
    logger = setup_logger("umr_test_console", "ERROR")
    [handler] = logger.handlers
    assert isinstance(handler, logging.StreamHandler)
    assert handler.level == logging.ERROR


def test_module_loggers_live_under_the_root():
    assert get_logger("metrics").name == f"{ROOT_LOGGER}.metrics"
    assert get_logger().name == ROOT_LOGGER
    assert get_logger("metrics").parent is logging.getLogger(ROOT_LOGGER)
