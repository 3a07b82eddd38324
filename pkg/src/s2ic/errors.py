"""Exception hierarchy shared by every layer of the toolkit."""


class S2icError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(S2icError):
    def __init__(self, message, line=None, column=None, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        where = f" at line {line}, column {column}" if line is not None else ""
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message}{where}{exp}")


class ResourceLimit(S2icError):
    """A configured limit (size, count or time) was hit before an answer was found.

    ``stats`` carries whatever partial statistics the computation had gathered.
    """

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})


class SizeLimit(ResourceLimit):
    pass


class NotFound(S2icError, KeyError):
    pass


class FrameError(S2icError, ValueError):
    pass


class NotSurjective(FrameError):
    pass


class NotAPartition(FrameError):
    pass


class NotRegular(FrameError):
    pass


class SpecViolation(FrameError):
    pass


class PreconditionViolation(FrameError):
    pass


class EmptyPullback(FrameError):
    pass
