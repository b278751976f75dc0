"""Encoder and tokenizer adapters.

Two families are supported behind one interface:

- ``tiny`` (or ``tiny-<dim>``): a small randomly initialized bag-of-embeddings
  encoder paired with a hash tokenizer. Fully offline and deterministic;
  used for smoke training, sweeps on synthetic data, and the test suite.
- any other id: treated as a published pretrained encoder name and loaded
  through the optional ``transformers`` dependency. The pretrained weights
  are an external dependency; this module only adapts them.

An encoder adapter maps (token_ids, attention_mask) batches to one pooled
vector per sequence. Pooling for pretrained encoders uses the designated
classification token embedding.
"""

from __future__ import annotations

import hashlib

import torch
from torch import nn

from .errors import EncoderFailure, TokenizerUnavailable

PAD_ID = 0
CLS_ID = 1
SEP_ID = 2
UNK_ID = 3
_RESERVED = 4


class HashTokenizer:
    """Whitespace tokenizer hashing each word to a stable id.

    Deterministic across processes (md5, not the salted builtin hash), so
    tokenized datasets and checkpoints are reproducible.
    """

    def __init__(self, vocab_size: int = 4096):
        if vocab_size <= _RESERVED:
            raise ValueError("vocab_size must exceed the reserved id range")
        self.vocab_size = vocab_size
        self.pad_id = PAD_ID
        self.cls_id = CLS_ID
        self.sep_id = SEP_ID

    def encode_body(self, text: str) -> list[int]:
        ids = []
        for word in text.split():
            digest = hashlib.md5(word.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:8], "big") % (self.vocab_size - _RESERVED)
            ids.append(_RESERVED + bucket)
        return ids


class TinyEncoder(nn.Module):
    """Randomly initialized embedding table with masked mean pooling."""

    def __init__(self, vocab_size: int = 4096, hidden_size: int = 32, seed: int = 0):
        super().__init__()
        self.vocab_size = vocab_size
        self.hidden_size = hidden_size
        generator = torch.Generator().manual_seed(seed)
        weight = torch.normal(0.0, 1.0, size=(vocab_size, hidden_size), generator=generator)
        weight[PAD_ID] = 0.0
        self.embedding = nn.Embedding(vocab_size, hidden_size, padding_idx=PAD_ID, _weight=weight)

    def forward(self, token_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        mask = attention_mask.unsqueeze(-1).to(dtype=torch.float32)
        embedded = self.embedding(token_ids) * mask
        lengths = mask.sum(dim=1).clamp(min=1.0)
        return embedded.sum(dim=1) / lengths


class TransformersEncoder(nn.Module):
    """Adapter over a published pretrained contextual encoder."""

    def __init__(self, model_id: str):
        super().__init__()
        try:
            from transformers import AutoModel
        except ImportError as exc:
            raise EncoderFailure(
                f"encoder {model_id!r} needs the optional 'transformers' dependency"
            ) from exc
        try:
            self.model = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise EncoderFailure(f"cannot load pretrained encoder {model_id!r}: {exc}") from exc
        self.hidden_size = self.model.config.hidden_size

    def forward(self, token_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        output = self.model(input_ids=token_ids, attention_mask=attention_mask)
        # Pooled representation: the classification-token embedding.
        return output.last_hidden_state[:, 0]


class TransformersTokenizer:
    """Pairs a pretrained encoder with its published tokenizer."""

    def __init__(self, model_id: str):
        try:
            from transformers import AutoTokenizer
        except ImportError as exc:
            raise TokenizerUnavailable(
                f"tokenizer for {model_id!r} needs the optional 'transformers' dependency"
            ) from exc
        try:
            self._tok = AutoTokenizer.from_pretrained(model_id)
        except Exception as exc:
            raise TokenizerUnavailable(f"cannot load tokenizer {model_id!r}: {exc}") from exc
        self.vocab_size = self._tok.vocab_size
        self.pad_id = self._tok.pad_token_id or 0
        self.cls_id = self._tok.cls_token_id
        self.sep_id = self._tok.sep_token_id

    def encode_body(self, text: str) -> list[int]:
        return self._tok.encode(text, add_special_tokens=False)


def is_tiny_encoder(encoder_id: str) -> bool:
    return encoder_id == "tiny" or encoder_id.startswith("tiny-")


def build_encoder(encoder_id: str, seed: int = 0):
    """Resolve an encoder id to (encoder module, paired tokenizer, hidden size)."""
    if is_tiny_encoder(encoder_id):
        hidden = 32
        if encoder_id.startswith("tiny-"):
            try:
                hidden = int(encoder_id.split("-", 1)[1])
            except ValueError:
                raise EncoderFailure(f"bad tiny encoder id {encoder_id!r}; use tiny-<dim>") from None
        tokenizer = HashTokenizer()
        encoder = TinyEncoder(vocab_size=tokenizer.vocab_size, hidden_size=hidden, seed=seed)
        return encoder, tokenizer, hidden
    encoder = TransformersEncoder(encoder_id)
    tokenizer = TransformersTokenizer(encoder_id)
    return encoder, tokenizer, encoder.hidden_size
