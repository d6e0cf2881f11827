"""Exception hierarchy with stable categories for CLI exit codes."""


class DepthgfError(Exception):
    """Base class for all errors raised by this package."""

    category = "internal"


class InputDomainError(DepthgfError, ValueError):
    """An argument lies outside the documented domain of an operation."""

    category = "input"


class FormatError(DepthgfError, ValueError):
    """An image file uses an unsupported format, mode, or bit depth."""

    category = "format"


class AlignmentError(DepthgfError, ValueError):
    """Color and depth planes do not share the same dimensions."""

    category = "alignment"


class CapacityError(DepthgfError):
    """A dense-oracle operation was asked to exceed its size cap."""

    category = "capacity"


class NumericOverflowError(DepthgfError, ArithmeticError):
    """Non-finite values appeared mid-computation (stale scaling, overflow)."""

    category = "numeric"


class FitError(DepthgfError, ValueError):
    """Polynomial fitting failed (underdetermined or rank-deficient system)."""

    category = "fit"


class UndefinedRatioError(DepthgfError, ZeroDivisionError):
    """A ratio such as an energy fraction is undefined for the given input."""

    category = "undefined-ratio"
