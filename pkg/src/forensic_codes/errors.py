"""Exception hierarchy shared by every module."""


class ForensicError(Exception):
    """Base class for all package errors."""


class OutOfRangeError(ForensicError, IndexError):
    """A crop, window, index or shift falls outside its allowed range."""


class GridFormatError(ForensicError, ValueError):
    """A grid file is malformed, truncated or has unusable dimensions."""


class ParameterError(ForensicError, ValueError):
    """Requested code parameters are infeasible.

    ``constraint`` names the violated condition so callers (and the CLI) can
    report it without parsing the message.
    """

    def __init__(self, constraint: str, message: str | None = None):
        self.constraint = constraint
        super().__init__(message or constraint)


class DecodeError(ForensicError):
    """Decoding a fragment failed."""


class IllegalFragmentError(DecodeError):
    """The fragment does not carry enough of the codeword to decode."""


class CorruptFragmentError(DecodeError):
    """The fragment is inconsistent with any valid codeword (or exceeds the flip budget)."""


class LemmaViolationError(ForensicError):
    """A unit-count guarantee did not hold for the given fragment shape."""
