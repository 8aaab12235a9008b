"""Exception types raised by qruler."""


class QRulerError(Exception):
    """Base class for all library errors."""


class InputError(QRulerError, ValueError):
    """Arguments outside the documented domain."""


class TruncationError(QRulerError):
    """The Fock cutoff is too small for the requested accuracy."""

    def __init__(self, message, suggested_cutoff=None):
        super().__init__(message)
        self.suggested_cutoff = suggested_cutoff


class AliasingError(QRulerError):
    """A grid field has not decayed at the grid boundary."""
