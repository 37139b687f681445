"""Exception hierarchy shared by all pipeline stages."""


class QuasiDistError(ValueError):
    """Base class for every error raised by the package."""


class ParseError(QuasiDistError):
    """Malformed or inconsistent input data (CSV rows, report files)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericError(QuasiDistError):
    """A numerical stage cannot produce a meaningful result."""
