"""Exception types raised by the package."""


class SlpIndexError(Exception):
    """Base class for every error raised by slpindex."""


class GrammarError(SlpIndexError):
    pass


class CyclicReference(GrammarError):
    pass


class DanglingSymbol(GrammarError):
    pass


class BadRoot(GrammarError):
    pass


class LengthMismatch(GrammarError):
    pass


class TooLarge(SlpIndexError):
    pass


class OutOfRange(SlpIndexError, IndexError):
    pass


class EmptyInput(SlpIndexError, ValueError):
    pass


class ParseError(SlpIndexError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownSymbol(ParseError):
    pass


class ParamError(SlpIndexError, ValueError):
    pass


class NotPerfectSquare(ParamError):
    pass


class TooSmall(ParamError):
    pass


class EmptySet(SlpIndexError, ValueError):
    pass


class UnsampledPosition(SlpIndexError, KeyError):
    pass


class CursorExhausted(SlpIndexError):
    pass


class IndexFormatError(SlpIndexError):
    """The index file is malformed or was written by an incompatible version."""


class ChecksumError(IndexFormatError):
    pass
