# -*- coding: utf-8 -*-
from __future__ import absolute_import

import logging

__all__ = ['get_logger', 'create_logger', 'DEFAULT_LOGGER_NAME', 'LOG_LEVELS']

DEFAULT_LOGGER_NAME = 'abstractions'
DEFAULT_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

LOG_LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warn': logging.WARNING,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL,
}

_logger = None


def create_logger(level=None, path=None, name=DEFAULT_LOGGER_NAME):
    """Creates the package logger. `level` is a name from `LOG_LEVELS` or a
    numeric level; `path` switches the stream handler for a file handler."""
    global _logger

    logger = logging.getLogger(name)
    logger.propagate = False

    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    if path:
        handler = logging.FileHandler(path)
    else:
        handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(fmt=DEFAULT_FORMAT))
    logger.addHandler(handler)

    if isinstance(level, str):
        try:
            level = LOG_LEVELS[level.lower()]
        except KeyError:
            raise ValueError("Unknown log level '%s'" % level)
    logger.setLevel(level if level is not None else logging.WARNING)

    if name == DEFAULT_LOGGER_NAME:
        _logger = logger
    return logger


def get_logger(path=None):
    """Returns the shared package logger, creating it on first use."""
    global _logger

    if _logger is None or path:
        level = _logger.level if _logger is not None else None
        _logger = create_logger(level=level, path=path)

    return _logger
