"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class QsciError(Exception):
    """Base class for all errors raised by qsci."""


class InputError(QsciError, ValueError):
    """Malformed or out-of-contract input (dimensions, names, parameters)."""


class EncodingError(InputError):
    """A classical vector or matrix cannot be encoded as requested."""


class PostselectionError(QsciError):
    """Postselection probability vanished, so no output state exists."""


class ToleranceError(QsciError):
    """A requested precision could not be reached within the allowed budget."""
