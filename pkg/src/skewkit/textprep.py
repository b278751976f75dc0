"""Arabic social-media/news text normalization and encoder-ready tokenization.

The normalization pipeline is a set of explicit, independently testable
flags (the flag set is recorded in every experiment manifest). Every
transform is deterministic and the composed pipeline is idempotent.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass
from typing import Protocol

from .errors import ShapeMismatch

URL_PLACEHOLDER = "[URL]"
USER_PLACEHOLDER = "[USER]"

# Arabic combining marks (tashkeel) plus the dagger alef.
DIACRITICS = "ًٌٍَُِّْٰ"
TATWEEL = "ـ"

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_DIACRITICS_RE = re.compile(f"[{DIACRITICS}]")
_WS_RE = re.compile(r"\s+")

# Letter-variant unification: alef forms to bare alef, alef maksura to yeh,
# teh marbuta to heh.
_LETTER_VARIANTS = str.maketrans(
    {
        "آ": "ا",  # alef madda
        "أ": "ا",  # alef hamza above
        "إ": "ا",  # alef hamza below
        "ٱ": "ا",  # alef wasla
        "ى": "ي",  # alef maksura -> yeh
        "ة": "ه",  # teh marbuta -> heh
    }
)


@dataclass(frozen=True)
class NormalizationConfig:
    """Flag set for the text normalizer; all-false is the identity."""

    replace_urls: bool = False
    replace_user_mentions: bool = False
    strip_diacritics: bool = False
    normalize_letter_variants: bool = False
    collapse_whitespace: bool = False
    strip_tatweel: bool = False

    def to_dict(self) -> dict[str, bool]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationConfig":
        return cls(**{k: bool(v) for k, v in d.items()})


IDENTITY_NORMALIZATION = NormalizationConfig()

# Standard preprocessing for the Arabic pipelines in this toolkit.
DEFAULT_NORMALIZATION = NormalizationConfig(
    replace_urls=True,
    replace_user_mentions=True,
    strip_diacritics=True,
    normalize_letter_variants=True,
    collapse_whitespace=True,
    strip_tatweel=True,
)


def normalize(text: str, config: NormalizationConfig = DEFAULT_NORMALIZATION) -> str:
    """Apply the configured transforms; deterministic and idempotent."""
    if config.replace_urls:
        text = _URL_RE.sub(URL_PLACEHOLDER, text)
    if config.replace_user_mentions:
        text = _MENTION_RE.sub(USER_PLACEHOLDER, text)
    if config.strip_diacritics:
        text = _DIACRITICS_RE.sub("", text)
    if config.strip_tatweel:
        text = text.replace(TATWEEL, "")
    if config.normalize_letter_variants:
        text = text.translate(_LETTER_VARIANTS)
    if config.collapse_whitespace:
        text = _WS_RE.sub(" ", text).strip()
    return text


class TokenizerHandle(Protocol):
    """Minimal contract a paired tokenizer must satisfy.

    ``encode_body`` returns the un-truncated token ids of the text without
    begin/end markers; the markers are added by :func:`tokenize`.
    """

    cls_id: int
    sep_id: int
    pad_id: int
    vocab_size: int

    def encode_body(self, text: str) -> list[int]: ...


@dataclass(frozen=True)
class TokenizedSample:
    """Token ids truncated to the configured maximum length."""

    id: str
    token_ids: tuple[int, ...]
    attention_mask: tuple[int, ...]
    original_length: int

    def __post_init__(self):
        if len(self.token_ids) != len(self.attention_mask):
            raise ShapeMismatch("token_ids and attention_mask lengths differ")

    @property
    def truncated(self) -> bool:
        return self.original_length > len(self.token_ids)


def tokenize(
    text: str,
    tokenizer: TokenizerHandle,
    max_seq_len: int,
    sample_id: str = "",
) -> TokenizedSample:
    """Encode ``text`` with begin/end markers, truncating the tail.

    ``original_length`` records the pre-truncation token count (markers
    included) so truncation statistics stay available downstream.
    """
    if max_seq_len < 2:
        raise ValueError("max_seq_len must leave room for begin/end markers")
    body = tokenizer.encode_body(text)
    original_length = len(body) + 2
    kept = body[: max_seq_len - 2]
    ids = (tokenizer.cls_id, *kept, tokenizer.sep_id)
    return TokenizedSample(
        id=sample_id,
        token_ids=ids,
        attention_mask=(1,) * len(ids),
        original_length=original_length,
    )


def truncation_report(split, tokenizer: TokenizerHandle, max_seq_len: int) -> float:
    """Fraction of a split's samples whose encoding exceeds max_seq_len."""
    truncated = sum(
        1
        for s in split.samples
        if tokenize(s.text, tokenizer, max_seq_len, s.id).truncated
    )
    return truncated / len(split.samples)
