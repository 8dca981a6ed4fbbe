"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class RetnetError(Exception):
    """Base class for all retnet errors."""


class NotFoundError(RetnetError, KeyError):
    """A vertex (or other keyed item) is not present."""

    def __str__(self):
        return Exception.__str__(self)


class ContractViolation(RetnetError, ValueError):
    """A precondition of an operation does not hold."""


class UndefinedMeasureError(RetnetError, ValueError):
    """A measure is undefined for the given input (e.g. zero total weight)."""


class ParseError(RetnetError, ValueError):
    """An input record could not be parsed.

    ``lineno`` is 1-based when known.
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(ParseError):
    """A record parsed but holds a value outside its schema."""
