"""Exception hierarchy shared by every module of the package."""


class KleisliError(Exception):
    """Base class for all errors raised by this package."""


class MonadMismatch(KleisliError):
    pass


class SpaceMismatch(KleisliError):
    pass


class WrongMonad(KleisliError):
    pass


class AlphabetMismatch(KleisliError):
    pass


class NonMonotoneDetected(KleisliError):
    """A Kleene iteration produced an iterate not above its predecessor."""


class TooLarge(KleisliError):
    pass


class BadSplit(KleisliError):
    pass


class UnknownSuite(KleisliError):
    pass


class GenerationFailed(KleisliError):
    pass


class ParseError(KleisliError):
    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class SchemaError(KleisliError):
    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class HeaderMismatch(ParseError):
    pass


class UnknownState(KleisliError):
    pass
