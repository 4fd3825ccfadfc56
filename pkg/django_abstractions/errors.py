# -*- coding: utf-8 -*-
"""Exceptions used across the toolkit.

Library code raises these; the API and the management command translate
them into HTTP and command-line errors."""

__all__ = [
    'AbstractionError', 'ArgumentError', 'ModelError', 'ConvergenceError',
    'ConfigurationError', 'NoSuchExtensionError', 'NoSuchEnvironmentError',
    'NoSuchTargetError', 'NoSuchExperimentError', 'BoundViolationError',
]


class AbstractionError(Exception):
    """Base class for every error raised by the toolkit."""


class ArgumentError(AbstractionError):
    """Invalid argument or violated precondition."""


class ModelError(AbstractionError):
    """Structurally invalid MDP, option, abstraction or hierarchy."""


class ConvergenceError(AbstractionError):
    """An iterative procedure hit its cap or cannot terminate."""

    def __init__(self, message, iterations=None, residual=None):
        super(ConvergenceError, self).__init__(message)
        self.iterations = iterations
        self.residual = residual


class ConfigurationError(AbstractionError):
    """Invalid workspace or experiment configuration."""


class NoSuchExtensionError(AbstractionError):
    def __init__(self, kind, name):
        super(NoSuchExtensionError, self).__init__(
            "Unknown %s '%s'" % (kind, name)
        )
        self.kind = kind
        self.name = name


class NoSuchEnvironmentError(NoSuchExtensionError):
    def __init__(self, name):
        super(NoSuchEnvironmentError, self).__init__('environment', name)


class NoSuchTargetError(NoSuchExtensionError):
    def __init__(self, name):
        super(NoSuchTargetError, self).__init__('reproduce target', name)


class NoSuchExperimentError(AbstractionError):
    pass


class BoundViolationError(AbstractionError):
    """A certified inequality failed during an asserting audit."""

    def __init__(self, message, measured=None, bound=None):
        super(BoundViolationError, self).__init__(message)
        self.measured = measured
        self.bound = bound
