"""Exception types shared across the package."""


class TopicStreamError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TopicStreamError):
    """Invalid run configuration or command-line usage."""


class StreamParseError(TopicStreamError):
    """A document stream file could not be parsed.

    Carries the 1-based line number of the offending record.
    """

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class ProviderError(TopicStreamError):
    """An embedding provider failed (lookup miss, bad response, timeout)."""


class SnapshotError(TopicStreamError):
    """A graph snapshot file is corrupt or has an unsupported version."""


class MissingEdgeError(TopicStreamError):
    """An edge lookup referenced a pair that is not in the graph."""


class UnknownWordError(TopicStreamError):
    """A node lookup referenced a word that is not in the graph."""
