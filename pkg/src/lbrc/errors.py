"""Exception types shared across the package."""


class LbrcError(Exception):
    """Base class for package errors."""


class InvalidDataError(LbrcError):
    """Malformed observations, CSV rows, or containers."""


class ConfigError(LbrcError):
    """Malformed experiment configuration or CLI flags."""


class WindowError(LbrcError):
    """Evaluation window fails the integrability diagnostic."""


class ComputeError(LbrcError):
    """A numerical routine produced a non-finite or impossible result."""
