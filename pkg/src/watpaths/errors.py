"""Exception types shared across the watpaths package."""

from __future__ import annotations


class WatPathsError(Exception):
    """Base class for all watpaths errors."""


class WatSyntaxError(WatPathsError, ValueError):
    """A WAT source string could not be parsed.

    ``position`` is the 0-based character offset at which the problem was
    detected.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnbalancedParensError(WatSyntaxError):
    """Opening and closing parentheses do not match up."""


class MalformedTokenError(WatSyntaxError):
    """A token could not be lexed (unterminated string or comment, stray byte)."""


class UnfrozenSetError(WatPathsError, RuntimeError):
    """A path set was queried or persisted before being frozen."""


class ManifestFormatError(WatPathsError, ValueError):
    """A path-set manifest file is malformed. ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class ModeMismatchError(WatPathsError, ValueError):
    """Two artifacts built under different path modes were combined."""


class MissingLabelError(WatPathsError, KeyError):
    """No label could be resolved for a function record."""
