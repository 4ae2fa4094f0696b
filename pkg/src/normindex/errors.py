"""Exception types raised by normindex."""


class NormIndexError(Exception):
    """Base class for all library errors."""


class InvalidInputError(NormIndexError, ValueError):
    """Malformed data or an argument outside its allowed range."""


class BindingError(NormIndexError, ValueError):
    """An index was used with a dataset it was not built from."""


class UndefinedSimilarityError(NormIndexError, ValueError):
    """Cosine similarity requested for a zero-norm vector."""


class ParseError(InvalidInputError):
    """A text file could not be parsed.

    ``lineno`` is 1-based and points at the offending line, or is None
    when the problem is not tied to a single line (e.g. an empty file).
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
