"""Document stream loading and text preprocessing.

Input is JSONL, one document per line:

    {"id": str, "ts": int, "text": str, "likes": int, "rts": int,
     "lang": str?, "entities": [[start, end, "TYPE"]]?}

Entity spans index into the whitespace-split tokens of the raw text and
protect the covered tokens from stopword removal: the span is merged into
a single underscore-joined token that later becomes one graph node.
"""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import StreamParseError

logger = logging.getLogger(__name__)


@dataclass
class Document:
    """One raw time-stamped short document with engagement counts."""

    id: str
    timestamp: int
    text: str
    likes: int = 0
    retweets: int = 0
    lang: Optional[str] = None
    entity_spans: list[tuple[int, int, str]] = field(default_factory=list)


@dataclass
class TokenizedDocument:
    """A preprocessed document ready for graph insertion.

    ``tokens`` keeps original order (with duplicates) for tagging; graph
    insertion deduplicates. Entity phrases are already merged into single
    underscore-joined tokens listed in ``entity_tokens``.
    """

    id: str
    timestamp: int
    tokens: list[str]
    likes: int = 0
    retweets: int = 0
    entity_tokens: set[str] = field(default_factory=set)
    entity_types: dict[str, str] = field(default_factory=dict)


def _is_strippable(ch: str) -> bool:
    # Leading/trailing punctuation and symbols (incl. emoji) are stripped;
    # interior characters are always kept so tokens like "1-0" survive.
    return unicodedata.category(ch)[0] in ("P", "S")


def normalize_token(raw: str) -> str:
    """Lowercase and strip leading/trailing punctuation or symbols."""
    start, end = 0, len(raw)
    while start < end and _is_strippable(raw[start]):
        start += 1
    while end > start and _is_strippable(raw[end - 1]):
        end -= 1
    return raw[start:end].lower()


def _parse_entities(value, n_tokens: int):
    if not isinstance(value, list):
        raise ValueError("'entities' must be a list")
    spans = []
    for item in value:
        if (
            not isinstance(item, (list, tuple))
            or len(item) != 3
            or not isinstance(item[0], int)
            or isinstance(item[0], bool)
            or not isinstance(item[1], int)
            or isinstance(item[1], bool)
            or not isinstance(item[2], str)
        ):
            raise ValueError("entity span must be [start, end, type]")
        start, end, etype = item
        if start < 0 or end < start or end >= n_tokens:
            raise ValueError(f"entity span ({start},{end}) outside token range")
        spans.append((start, end, etype))
    spans.sort(key=lambda s: s[0])
    for prev, cur in zip(spans, spans[1:]):
        if cur[0] <= prev[1]:
            raise ValueError("entity spans overlap")
    return spans


def _require(record: dict, key: str, kind, name: str):
    if key not in record:
        raise ValueError(f"missing required field '{key}'")
    value = record[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ValueError(f"field '{key}' must be {name}")
    return value


def parse_document(record: dict) -> Document:
    """Validate one decoded JSONL record and build a Document."""
    doc_id = _require(record, "id", str, "a string")
    ts = _require(record, "ts", int, "an integer")
    text = _require(record, "text", str, "a string")
    likes = _require(record, "likes", int, "an integer") if "likes" in record else 0
    rts = _require(record, "rts", int, "an integer") if "rts" in record else 0
    if ts < 0:
        raise ValueError("'ts' must be >= 0")
    if likes < 0 or rts < 0:
        raise ValueError("'likes' and 'rts' must be >= 0")
    lang = record.get("lang")
    if lang is not None and not isinstance(lang, str):
        raise ValueError("field 'lang' must be a string")
    spans = []
    if record.get("entities") is not None:
        spans = _parse_entities(record["entities"], len(text.split()))
    return Document(
        id=doc_id,
        timestamp=ts,
        text=text,
        likes=likes,
        retweets=rts,
        lang=lang,
        entity_spans=spans,
    )


def load_stream(path: str | Path, format: str = "jsonl") -> list[Document]:
    """Load a document stream file and return it in timestamp order.

    The sort is stable, so documents sharing a timestamp keep file order.
    Raises StreamParseError naming the offending line on any bad record.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported stream format: {format!r}")
    docs: list[Document] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StreamParseError(line_no, f"invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise StreamParseError(line_no, "record is not a JSON object")
            try:
                docs.append(parse_document(record))
            except ValueError as exc:
                raise StreamParseError(line_no, str(exc)) from exc
    docs.sort(key=lambda d: d.timestamp)
    return docs


def load_stopwords(path: str | Path) -> set[str]:
    """Load a stopword list: plain text, one word per line, UTF-8."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word:
                words.add(word)
    return words


def preprocess(
    doc: Document,
    stopwords: Iterable[str] = (),
    keep_non_english: bool = False,
) -> Optional[TokenizedDocument]:
    """Normalize a document into tokens, or None if it should be dropped.

    Non-English documents (by the trusted ``lang`` field) are dropped
    unless ``keep_non_english`` is set. Tokens covered by an entity span
    are merged into one underscore-joined token and keep their stopwords;
    everything else is lowercased, stripped of edge punctuation, and
    filtered against the stopword set. Documents left with no tokens are
    dropped.
    """
    if not keep_non_english and doc.lang is not None and doc.lang != "en":
        return None
    stopset = stopwords if isinstance(stopwords, set) else set(stopwords)

    raw_tokens = doc.text.split()
    span_start = {s[0]: s for s in doc.entity_spans}
    tokens: list[str] = []
    entity_tokens: set[str] = set()
    entity_types: dict[str, str] = {}

    i = 0
    while i < len(raw_tokens):
        span = span_start.get(i)
        if span is not None:
            start, end, etype = span
            parts = [normalize_token(t) for t in raw_tokens[start : end + 1]]
            surface = "_".join(p for p in parts if p)
            if surface:
                tokens.append(surface)
                entity_tokens.add(surface)
                entity_types[surface] = etype
            i = end + 1
            continue
        token = normalize_token(raw_tokens[i])
        if token and token not in stopset:
            tokens.append(token)
        i += 1

    if not tokens:
        return None
    return TokenizedDocument(
        id=doc.id,
        timestamp=doc.timestamp,
        tokens=tokens,
        likes=doc.likes,
        retweets=doc.retweets,
        entity_tokens=entity_tokens,
        entity_types=entity_types,
    )
