"""Exception types shared across the package."""


class LQError(Exception):
    """Base class for all package errors."""


class DataError(LQError, ValueError):
    """Bad input: missing file, unknown column, too few rows, invalid parameter."""


class DegenerateError(LQError, ArithmeticError):
    """A quantity is undefined because a series has (numerically) zero spread."""
