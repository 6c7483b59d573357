"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """A configuration value is outside its admissible range."""


class InvalidInputError(ValueError):
    """Input data violates an operation's precondition."""


class DegenerateInputError(InvalidInputError):
    """Input is well-formed but carries no usable information (e.g. all zeros)."""


class ParseError(ValueError):
    """Malformed file content."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFormatError(ParseError):
    """File is well-formed but uses a storage format we do not read."""
