"""Exception hierarchy."""


class SubmajError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitian(SubmajError, ValueError):
    pass


class DimensionMismatch(SubmajError, ValueError):
    pass


class DomainError(SubmajError, ValueError):
    """A matrix function or divergence was evaluated outside its domain."""


class AlphaOutOfRange(DomainError):
    pass


class GammaOutOfRange(DomainError):
    pass


class NotCommuting(SubmajError, ValueError):
    """A commuting family was required; carries the offending pair."""

    def __init__(self, message, pair=None, norm=None):
        super().__init__(message)
        self.pair = pair
        self.norm = norm


class NotClassical(SubmajError, ValueError):
    pass


class NotUnitary(SubmajError, ValueError):
    pass


class LengthMismatch(SubmajError, ValueError):
    pass


class LabelMismatch(SubmajError, ValueError):
    pass


class MalformedProgram(SubmajError, ValueError):
    pass


class SolverStall(SubmajError, RuntimeError):
    pass


class DimensionCap(SubmajError, ValueError):
    pass


class ParseError(SubmajError, ValueError):
    """Malformed input file; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column
