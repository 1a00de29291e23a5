"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to.
"""


class ShiftError(Exception):
    exit_code = 1


class InputError(ShiftError, ValueError):
    exit_code = 2


class NotConnectable(ShiftError):
    """No padding word of admissible length joins two words."""

    exit_code = 2


class PrecisionError(ShiftError, ArithmeticError):
    """Stored precision cannot decide which partition cell a point lies in."""

    exit_code = 2


class InfeasibleTarget(ShiftError):
    """Target vector lies outside the invariant polytope."""

    exit_code = 3


class NotIrreducible(ShiftError):
    exit_code = 3


class ResourceError(ShiftError):
    """An enumeration cap, length budget or stage budget was exceeded."""

    exit_code = 4


class PaperBoundViolation(ShiftError, AssertionError):
    """A measured quantity broke one of the explicit proof bounds."""

    exit_code = 5


class TruncatedStream(ShiftError):
    """Stream ended before the last requested checkpoint.

    ``partial`` holds whatever was computed before the stream ran dry.
    """

    exit_code = 2

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []
