"""Exception types shared across the engine."""


class ZoomwriteError(Exception):
    """Base class for all engine errors."""


class InvalidAlphabetError(ZoomwriteError):
    """Alphabet description is malformed (duplicates, no separator, too small)."""


class CorpusDecodeError(ZoomwriteError):
    """Corpus bytes are not valid text; carries the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


class ConfigError(ZoomwriteError):
    """A configuration value is out of its allowed range."""


class DomainError(ZoomwriteError):
    """An argument is outside the operation's domain (bad symbol, bad point)."""


class UsageError(ZoomwriteError):
    """An API protocol violation, e.g. rolling back tokens out of order."""


class QuantizationError(ZoomwriteError):
    """Integer total too small to give every symbol a positive weight."""


class MinWidthError(ZoomwriteError):
    """Node too narrow to subdivide; caller must rebase or stop descending."""


class DecodeError(ZoomwriteError):
    """Bitstream is malformed, truncated, or inconsistent with its header."""
