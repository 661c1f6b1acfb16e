"""Exception hierarchy shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all openscene errors."""


class ParseError(ToolkitError):
    """Input text/JSON is malformed.  Carries location context in the message."""


class SchemaError(ToolkitError):
    """Input parses but violates the documented schema."""


class ValidationError(ToolkitError):
    """A constructed value violates a type invariant."""


class CodecError(ToolkitError):
    """Run-length data is inconsistent with its declared dimensions."""


class GeometryError(ToolkitError):
    """Mask/box geometry mismatch (dimensions, degenerate region)."""


class RangeError(ToolkitError):
    """A query point or region falls outside the image."""


class NotFoundError(ToolkitError):
    """A looked-up verb or scene id does not exist."""


class TransportError(ToolkitError):
    """Segmenter endpoint unreachable after retries."""

    def __init__(self, message: str, retries: int = 0):
        super().__init__(message)
        self.retries = retries


class SegmenterTimeout(TransportError):
    """Segmenter did not answer within the configured timeout."""


class ProtocolError(ToolkitError):
    """Segmenter answered with a response that breaks the wire contract."""


class BuildError(ToolkitError):
    """A scene bundle could not be assembled from its inputs."""
