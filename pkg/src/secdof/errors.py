"""Exception hierarchy.

The three top-level families map one-to-one onto CLI exit codes:
configuration problems (1), infeasible schemes (2) and numerical
breakdown (3).
"""

from __future__ import annotations


class SdofError(Exception):
    """Base class for every error raised by this package."""


# -- configuration ---------------------------------------------------------
class ConfigError(SdofError, ValueError):
    pass


class ValidationError(ConfigError):
    pass


class InvalidAntennaCounts(ValidationError):
    pass


class IndivisibleStreams(ValidationError):
    pass


class ParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotApplicable(ConfigError):
    pass


class SchemeRegimeMismatch(ConfigError):
    pass


class NonIntegerBinStructure(ConfigError):
    pass


# -- feasibility -----------------------------------------------------------
class Infeasible(SdofError):
    """No stream plan satisfies the alignment constraints.

    ``binding`` names the constraint that failed; ``report`` is filled in by
    the sweep driver so callers still get the bound-only summary.
    """

    def __init__(self, message: str, binding: str | None = None, report=None):
        super().__init__(message)
        self.binding = binding
        self.report = report


# -- numerics --------------------------------------------------------------
class NumericalError(SdofError, ArithmeticError):
    pass


class ZeroMatrix(NumericalError):
    pass


class DimensionMismatch(NumericalError, ValueError):
    pass


class NotHermitian(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class Singular(NumericalError):
    pass


class TooManyStreams(NumericalError):
    pass


class NoFreeSpace(NumericalError):
    pass


class InsufficientPoints(NumericalError):
    pass


class TooLargeToEnumerate(SdofError):
    pass


class IndexOutOfRange(SdofError, IndexError):
    pass
