"""Exception types shared across the package."""


class ProsodexError(Exception):
    """Base class for all package-specific errors."""


class EmptyDocumentError(ProsodexError):
    """Raised when a document has no content after preprocessing."""


class DomainError(ProsodexError):
    """Raised when an input lies outside an operation's mathematical domain."""


class FitError(ProsodexError):
    """Raised when a distribution fit is degenerate or fails to converge."""


class ParseError(ProsodexError):
    """Raised on malformed lexicon input.

    Carries the 1-based line number of the offending line when applicable.
    """

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConfigError(ProsodexError):
    """Raised on invalid configuration or parameter values."""


class TrainError(ProsodexError):
    """Raised when a classifier cannot be trained on the given data."""
