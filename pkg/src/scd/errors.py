"""Exception types shared across the pipeline."""


class ScdError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ScdError):
    """Input violates a documented precondition or schema."""


class ParseError(ValidationError):
    """A line or record could not be parsed. Carries the offending location."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IntegrityError(ScdError):
    """Referential integrity or checksum failure (duplicate ids, missing
    features, corrupted files)."""


class VersionError(ScdError):
    """A persisted artifact declares an unsupported format version."""


class CoverageError(ScdError):
    """A transliteration table has no rule for a grapheme in the input."""

    def __init__(self, grapheme, offset):
        super().__init__(
            f"no transliteration rule for {grapheme!r} (U+{ord(grapheme[0]):04X}) at offset {offset}"
        )
        self.grapheme = grapheme
        self.offset = offset


class NoSwitchError(ScdError):
    """Code-switching found nothing to swap in the given question."""


class GenerationError(ScdError):
    """Synthetic corpus generation failed (e.g. lexicon missing a word)."""


class TransportError(ScdError):
    """Remote translation backend unreachable after retries."""


class ProtocolError(ScdError):
    """Remote translation backend returned a malformed response."""


class DivergenceError(ScdError):
    """Training loss became non-finite. Carries the global step index."""

    def __init__(self, step, message="non-finite training loss"):
        super().__init__(f"{message} at step {step}")
        self.step = step


class ConfigError(ScdError):
    """Bad or unknown configuration key/value."""


class StageError(ScdError):
    """A pipeline stage cannot run (missing input artifact, lock held, ...)."""
