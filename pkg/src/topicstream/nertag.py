"""Gazetteer-based named-entity tagging.

The tagger interface is just "tokens in, spans out", so documents may
also arrive with precomputed spans from any upstream tool. The default
implementation greedily matches the longest gazetteer phrase left to
right. Matched spans are merged into single underscore-joined tokens
before graph insertion, so a multi-word entity becomes one node.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .ingest import TokenizedDocument

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EntitySpan:
    start: int  # token index, inclusive
    end: int    # token index, inclusive
    entity_type: str
    surface: str  # underscore-joined covered tokens


class Gazetteer:
    """Lowercase phrase -> entity type lookup with longest-match support."""

    def __init__(self, phrases: dict[str, str] | None = None):
        self.phrases: dict[str, str] = {}
        self.max_len = 0
        for phrase, etype in (phrases or {}).items():
            self.add(phrase, etype)

    def add(self, phrase: str, entity_type: str) -> None:
        words = phrase.lower().split()
        if not words:
            raise ValueError("gazetteer phrase must be non-empty")
        self.phrases[" ".join(words)] = entity_type
        self.max_len = max(self.max_len, len(words))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "Gazetteer":
        """Load `phrase<TAB>TYPE` lines, UTF-8, lowercase phrases."""
        gaz = cls()
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                    raise ValueError(f"{path}: line {line_no}: expected 'phrase<TAB>TYPE'")
                gaz.add(parts[0].strip(), parts[1].strip())
        return gaz

    def __len__(self) -> int:
        return len(self.phrases)


def tag(doc: TokenizedDocument, gaz: Gazetteer) -> list[EntitySpan]:
    """Greedy leftmost-longest gazetteer match over the document tokens."""
    spans: list[EntitySpan] = []
    tokens = doc.tokens
    i = 0
    n = len(tokens)
    while i < n:
        matched = None
        for length in range(min(gaz.max_len, n - i), 0, -1):
            phrase = " ".join(tokens[i : i + length])
            etype = gaz.phrases.get(phrase)
            if etype is not None:
                matched = EntitySpan(
                    start=i,
                    end=i + length - 1,
                    entity_type=etype,
                    surface="_".join(tokens[i : i + length]),
                )
                break
        if matched is not None:
            spans.append(matched)
            i = matched.end + 1
        else:
            i += 1
    return spans


def merge_entities(doc: TokenizedDocument, spans: list[EntitySpan]) -> TokenizedDocument:
    """Replace each tagged span with its merged single-token surface."""
    if not spans:
        return doc
    by_start = {span.start: span for span in spans}
    tokens: list[str] = []
    entity_tokens = set(doc.entity_tokens)
    entity_types = dict(doc.entity_types)
    i = 0
    while i < len(doc.tokens):
        span = by_start.get(i)
        if span is not None:
            tokens.append(span.surface)
            entity_tokens.add(span.surface)
            entity_types[span.surface] = span.entity_type
            i = span.end + 1
        else:
            tokens.append(doc.tokens[i])
            i += 1
    return TokenizedDocument(
        id=doc.id,
        timestamp=doc.timestamp,
        tokens=tokens,
        likes=doc.likes,
        retweets=doc.retweets,
        entity_tokens=entity_tokens,
        entity_types=entity_types,
    )
