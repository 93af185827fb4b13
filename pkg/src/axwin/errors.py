"""Exception hierarchy shared by every axwin module."""


class AxWinError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(AxWinError, ValueError):
    """Tensor extents are incompatible with the requested operation."""


class ConfigError(AxWinError, ValueError):
    """An architecture or run configuration violates its invariants."""


class UnsupportedOpError(AxWinError, NotImplementedError):
    """An op on the tape has no registered adjoint."""


class NonFiniteError(AxWinError, FloatingPointError):
    """A kernel produced NaN or Inf."""


class TensorFormatError(AxWinError, OSError):
    """An AXTF file is malformed."""
