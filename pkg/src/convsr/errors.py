"""Exception hierarchy for the convsr package."""


class ConvsrError(Exception):
    """Base class for all convsr-specific errors."""


class DataFormatError(ConvsrError):
    """Malformed input file; the message carries a JSON-path-style locator."""


class SpanMismatchError(DataFormatError):
    """Answer offsets do not reproduce the answer text.

    ``qa_ids`` lists every offending question id found in the file.
    """

    def __init__(self, qa_ids):
        self.qa_ids = list(qa_ids)
        super().__init__(f"answer span mismatch for qa ids: {', '.join(self.qa_ids)}")


class MissingFieldError(DataFormatError):
    def __init__(self, field, where=""):
        self.field = field
        suffix = f" at {where}" if where else ""
        super().__init__(f"missing required field {field!r}{suffix}")


class DuplicateKeyError(ConvsrError):
    """Two rewrite records share the same (dialogue_id, turn_index)."""


class EmptyCorpusError(ConvsrError):
    pass


class MalformedSRError(ConvsrError):
    """String does not match the serialized structured-representation grammar."""


class UnclassifiableMentionError(ConvsrError):
    """Mention surface occurs in neither the history nor the passage."""


class GeneratorUnavailableError(ConvsrError):
    """Remote SR generator transport/parse failure."""


class ReaderUnavailableError(ConvsrError):
    """Remote reader transport failure."""


class InvalidRemoteSpanError(ConvsrError):
    """Remote reader returned a span that does not exist in the passage."""


class RewriterUnavailableError(ConvsrError):
    """Remote question rewriter transport failure."""


class ConcurrentTurnError(ConvsrError):
    """A turn is already in flight for this session."""
