"""Exception hierarchy shared by every toolkit module.

Data errors (bad graphs, bad CoNLL-U, misaligned files) derive from
``DataError``; bad flags and configuration derive from ``UsageError``. The CLI
maps the first family to exit code 2 and the second to exit code 1.
"""


class UmrToolkitError(Exception):
    """Base class for all toolkit errors."""


class DataError(UmrToolkitError, ValueError):
    """Input data is malformed or inconsistent."""


class UsageError(UmrToolkitError, ValueError):
    """The toolkit was invoked or configured incorrectly."""


class InvalidConfig(UsageError):
    pass


# graph-core

class ParseError(DataError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EmptyInput(ParseError):
    def __init__(self):
        super().__init__("empty PENMAN input", 0)


class DuplicateVariable(ParseError):
    def __init__(self, variable: str, position: int | None = None):
        self.variable = variable
        super().__init__(f"variable '{variable}' is defined more than once", position)


class UndefinedVariable(ParseError):
    def __init__(self, variable: str, position: int | None = None):
        self.variable = variable
        super().__init__(f"reference to undefined variable '{variable}'", position)


class SerializeError(DataError):
    def __init__(self, unreachable: list[str]):
        self.unreachable = list(unreachable)
        super().__init__(f"graph is disconnected; unreachable variables: {', '.join(self.unreachable)}")


# metrics

class TooLarge(DataError):
    pass


class EmptyCorpus(DataError):
    pass


# ud-ingest

class ConlluError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WrongColumnCount(ConlluError):
    pass


class NonContiguousIds(ConlluError):
    pass


class MultipleRoots(ConlluError):
    pass


class CyclicHeads(ConlluError):
    pass


# ud2umr

class UnmappableRoot(DataError):
    pass


class LengthMismatch(DataError):
    pass


class IdMismatch(DataError):
    pass


# amr2umr

class UnknownSelector(UsageError):
    pass


class DuplicateSourceRole(DataError):
    pass


class EmptyCandidates(DataError):
    pass


# corpus

class MalformedBlock(DataError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ":".join(str(part) for part in (path, line) if part is not None)
        super().__init__(f"{where}: {message}" if where else message)


class RatiosInvalid(UsageError):
    pass


# cli

class CountMismatch(DataError):
    pass


class UnparseablePrediction(DataError):
    def __init__(self, ids: list[str]):
        self.ids = list(ids)
        super().__init__(f"{len(self.ids)} unparseable prediction(s): {', '.join(self.ids)}")
