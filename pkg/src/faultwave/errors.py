"""Exception hierarchy shared across the package."""


class FaultwaveError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FaultwaveError, ValueError):
    """A configuration value is invalid (rate, duration, frequency, key...)."""


class BoundsError(FaultwaveError, ValueError):
    """A time instant or sample span falls outside the record."""


class ShapeError(FaultwaveError, ValueError):
    """Array length or shape is incompatible with the requested operation."""


class DegenerateInputError(FaultwaveError, ValueError):
    """Input carries no usable signal (zero power, empty span, rank zero)."""


class NumericalError(FaultwaveError, ArithmeticError):
    """A numeric routine produced non-finite values or lost rank."""
