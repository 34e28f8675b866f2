"""Exception types shared across the package."""


class CiteLensError(Exception):
    """Base class for all citelens errors."""


class InvalidBundle(CiteLensError):
    """Document bundle failed structural validation."""


class MalformedReferences(CiteLensError):
    """No entry delimiter could be found in a references block."""


class UnknownMarker(CiteLensError):
    """Marker id not present in the parsed document."""


class UnresolvedCitation(CiteLensError):
    """Marker did not resolve to a known paper; carries the raw entry text when available."""

    def __init__(self, message: str, raw_text: str = ""):
        super().__init__(message)
        self.raw_text = raw_text


class UnknownPaper(CiteLensError):
    """Paper id not present in the corpus."""


class InvalidMetadata(CiteLensError):
    """Paper metadata failed validation (e.g. empty title)."""


class InvalidEvent(CiteLensError):
    """Activity event failed validation (bad fraction, unknown kind, ...)."""


class CorruptLog(CiteLensError):
    """Event log malformed; replay stopped at the last valid sequence number."""

    def __init__(self, message: str, last_valid_seq: int = 0):
        super().__init__(message)
        self.last_valid_seq = last_valid_seq


class NotInLibrary(CiteLensError):
    """Requested a library card for a paper that is not saved."""


class UnparsedDocument(CiteLensError):
    """Paper exists but has no ingested parsed document."""


class ProviderUnavailable(CiteLensError):
    """Embedding provider failed or is not configured."""
