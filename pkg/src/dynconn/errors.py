"""Exception hierarchy shared by the forest core, oracles, workload engine and CLI."""


class DynConnError(Exception):
    """Base class for all library errors."""


# -- forest structure errors -------------------------------------------------

class DuplicateVertex(DynConnError):
    pass


class UnknownVertex(DynConnError):
    pass


class VertexNotIsolated(DynConnError):
    """Raised when removing a vertex that still has incident edges."""


class NotARoot(DynConnError):
    pass


class IsRoot(DynConnError):
    pass


class SameTree(DynConnError):
    pass


class NotSameTree(DynConnError):
    pass


class SelfLoop(DynConnError):
    pass


class EdgeExists(DynConnError):
    pass


class NoSuchEdge(DynConnError):
    pass


class NotTreeEdge(DynConnError):
    pass


# -- oracle errors -----------------------------------------------------------

class ComponentTooLarge(DynConnError):
    """An expensive oracle was asked about a component above its size cap."""


class UnsupportedOperation(DynConnError):
    """The selected structure cannot execute this event (e.g. delete on union-find)."""


# -- workload / CLI errors ---------------------------------------------------

class ParseError(DynConnError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyStream(DynConnError):
    pass


class IndivisibleParameters(DynConnError):
    pass


class ScheduleMismatch(DynConnError):
    pass


class ReplayError(DynConnError):
    """A structure error raised while replaying; carries the failing event index."""

    def __init__(self, message: str, event_index: int):
        super().__init__(f"event {event_index}: {message}")
        self.event_index = event_index


class VerificationError(DynConnError):
    """Structure answer diverged from the oracle during a verified replay."""

    def __init__(self, message: str, event_index: int, pair=None, expected=None, got=None):
        super().__init__(message)
        self.event_index = event_index
        self.pair = pair
        self.expected = expected
        self.got = got


class UsageError(DynConnError):
    """Bad command line / configuration; maps to exit code 1."""
