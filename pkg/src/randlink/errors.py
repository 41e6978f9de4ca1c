"""Exception hierarchy shared by all modules."""


class RandLinkError(Exception):
    """Base class for every error raised by randlink."""


class DegenerateProjection(RandLinkError):
    """A projected configuration is too close to non-generic to classify."""

    def __init__(self, message="degenerate projection", *, pair=None):
        super().__init__(message)
        self.pair = pair


class DegenerateIntersection(RandLinkError):
    """A segment meets a spanning triangle's boundary or plane tangentially."""


class OddCrossingSum(RandLinkError):
    """The signed crossing sum between two disjoint cycles came out odd."""


class InvalidProbability(RandLinkError, ValueError):
    pass


class CycleTooShort(RandLinkError, ValueError):
    pass


class ParseError(RandLinkError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateEdge(ParseError):
    pass


class IndexOutOfRange(ParseError):
    pass


class InsufficientSamples(RandLinkError, ValueError):
    pass


class NoPairs(RandLinkError, ValueError):
    pass


class MissingQPrime(RandLinkError, ValueError):
    pass


class OutOfRange(RandLinkError, ValueError):
    pass


class CensusViolation(RandLinkError):
    """An embedding breaks the known link census of its graph: a geometry bug."""

    def __init__(self, message, coords=None):
        super().__init__(message)
        self.coords = coords


class EnumerationCapExceeded(RandLinkError, ValueError):
    pass
