"""Exception hierarchy shared across the package."""


class PicError(Exception):
    """Base class for all errors raised by this package."""


class DataError(PicError):
    """Invalid, inconsistent, or out-of-contract input data."""


class NumericalError(PicError):
    """A numerical routine failed to converge or produced garbage."""
