"""Exception hierarchy.

Every error raised on purpose by this package derives from :class:`SdlError`,
so callers can catch one type. The CLI maps the subclasses to exit codes
(InvalidConfig -> 2, QuadratureFailure/BracketFailure -> 3).
"""


class SdlError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(SdlError, ValueError):
    """A parameter, configuration or input file violates its contract."""


class DomainError(SdlError, ValueError):
    """A query lies outside the mathematical domain of an operation."""


class BracketFailure(SdlError, ArithmeticError):
    """Root bracketing failed (typically by underflow at extreme parameters)."""


class QuadratureFailure(SdlError, ArithmeticError):
    """Numerical integration did not converge to the requested tolerance."""


class FormatError(InvalidConfig):
    """A binary or CSV input file is malformed (bad magic, truncated payload)."""
