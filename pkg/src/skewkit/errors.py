"""Exception types shared across the toolkit.

Every module raises subclasses of SkewkitError so callers can catch one
root type at orchestration boundaries.
"""

from __future__ import annotations


class SkewkitError(Exception):
    """Root of all toolkit errors."""


# --- corpus ---------------------------------------------------------------

class CorpusError(SkewkitError):
    pass


class MissingField(CorpusError):
    def __init__(self, field: str, line_no: int | None = None):
        self.field = field
        self.line_no = line_no
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"record missing required field {field!r}{where}")


class UnknownLabel(CorpusError):
    def __init__(self, value: str, vocab: tuple[str, ...] = ()):
        self.value = value
        self.vocab = vocab
        extra = f", expected one of {list(vocab)}" if vocab else ""
        super().__init__(f"unknown label {value!r}{extra}")


class DuplicateId(CorpusError):
    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        super().__init__(f"duplicate sample id {sample_id!r}")


class EmptyFile(CorpusError):
    pass


class EmptySplit(CorpusError):
    pass


class NoGenreAnnotations(CorpusError):
    pass


class LengthMismatch(SkewkitError):
    """Paired sequences differ in length (ids vs labels, gold vs pred)."""


class IoFailure(SkewkitError):
    pass


# --- textprep / encoders --------------------------------------------------

class TokenizerUnavailable(SkewkitError):
    pass


class EncoderFailure(SkewkitError):
    pass


# --- losses / model -------------------------------------------------------

class ShapeMismatch(SkewkitError):
    pass


class NonPositiveWeight(SkewkitError):
    pass


class CheckpointMismatch(SkewkitError):
    pass


class AllConfigsFailed(SkewkitError):
    pass


class OutOfResource(SkewkitError):
    pass


# --- metrics ---------------------------------------------------------------

class EmptyMatrix(SkewkitError):
    pass


class IdMismatch(SkewkitError):
    def __init__(self, missing: set[str], extra: set[str]):
        self.missing = missing
        self.extra = extra
        super().__init__(
            f"prediction ids do not match gold ids: "
            f"{len(missing)} missing, {len(extra)} extra"
        )


class ParseFailure(SkewkitError):
    pass


# --- llm probe -------------------------------------------------------------

class ProviderError(SkewkitError):
    pass


class ProviderTimeout(ProviderError):
    pass


class RateLimited(ProviderError):
    pass


class AuthFailure(ProviderError):
    pass


class EmptyQuery(SkewkitError):
    pass


class InsufficientData(SkewkitError):
    pass


class ProbeFailed(SkewkitError):
    """Too many samples failed at the provider to trust the run."""


# --- experiment manager ----------------------------------------------------

class ConfigInvalid(SkewkitError):
    def __init__(self, field: str, reason: str = "missing or invalid"):
        self.field = field
        self.reason = reason
        super().__init__(f"config field {field!r}: {reason}")


class NoReferenceForMode(SkewkitError):
    pass


class NoTrainingRuns(SkewkitError):
    pass
