"""Exception hierarchy shared by every stage of the pipeline."""


class WsbindError(Exception):
    """Base class for all errors raised by wsbind."""


class LocatedError(WsbindError):
    """An error tied to a location path inside a document."""

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class MalformedDocument(LocatedError):
    pass


class UnresolvedReference(LocatedError):
    pass


class InvariantViolation(LocatedError):
    pass


class MissingAnnotation(LocatedError):
    pass


class MalformedLine(WsbindError):
    def __init__(self, lineno: int, line: str) -> None:
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: expected '<iri> -- <iri>', got {line!r}")


class InvalidIri(WsbindError):
    pass


class DuplicateServiceId(WsbindError):
    pass


class ArityTooLarge(WsbindError):
    pass


class NoFeasibleAssignment(WsbindError):
    pass


class UnsupportedBehavior(WsbindError):
    pass


class UnboundActivity(WsbindError):
    pass


class UnknownActivity(WsbindError):
    pass


class AlreadyBound(WsbindError):
    pass


class NoCandidate(WsbindError):
    def __init__(self, activity_id: str, rank: int, available: int) -> None:
        self.activity_id = activity_id
        super().__init__(
            f"activity {activity_id!r} has {available} candidate(s), rank {rank} requested"
        )
