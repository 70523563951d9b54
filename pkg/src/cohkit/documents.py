"""Annotated-document model, interchange ingestion, and sentence truncation.

Documents arrive as JSON Lines, one document per line:

    {"doc_id": "...",
     "sentences": [{"tokens": ["...", ...],
                    "mentions": [{"entity": "...", "role": "s"|"o",
                                  "token_index": 0}, ...]}, ...]}

Unknown fields are ignored. Mentions whose role is neither subject ("s")
nor object ("o") are dropped at ingestion. Entity keys are lowercased;
an optional heuristic strips plural "s" endings.

All types are frozen and safe to share across workers.
"""

from __future__ import annotations

import io
import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO

log = logging.getLogger("cohkit")


class InterchangeError(ValueError):
    """Malformed interchange input. Carries the offending JSONL line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class Role(Enum):
    SUBJECT = "s"
    OBJECT = "o"


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    doc_offset: int  # 0-based term index within the whole document


@dataclass(frozen=True, slots=True)
class EntityMention:
    entity_id: str
    role: Role
    token_index: int  # head token position within the sentence


@dataclass(frozen=True, slots=True)
class Sentence:
    index: int
    tokens: tuple[Token, ...]
    mentions: tuple[EntityMention, ...]  # ordered by token_index


@dataclass(frozen=True, slots=True)
class AnnotatedDocument:
    doc_id: str
    sentences: tuple[Sentence, ...]

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    def token_count(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


def normalize_entity(key: str, strip_plural: bool = False) -> str:
    """Lowercase an entity key; optionally strip a trailing plural "s".

    The plural heuristic drops a single final "s" from keys longer than
    three characters unless they end in "ss" (keeps "hope" and "glass"
    intact, maps "cats" to "cat").
    """
    key = key.lower()
    if strip_plural and len(key) > 3 and key.endswith("s") and not key.endswith("ss"):
        key = key[:-1]
    return key


def _build_sentences(
    raw_sentences: Sequence[tuple[Sequence[str], Sequence[EntityMention]]],
) -> tuple[Sentence, ...]:
    """Assign sentence indices and contiguous document-wide token offsets."""
    sentences = []
    offset = 0
    for index, (surfaces, mentions) in enumerate(raw_sentences):
        tokens = tuple(Token(surface, offset + i) for i, surface in enumerate(surfaces))
        ordered = tuple(sorted(mentions, key=lambda m: m.token_index))
        sentences.append(Sentence(index=index, tokens=tokens, mentions=ordered))
        offset += len(tokens)
    return tuple(sentences)


def renumber_sentences(doc_id: str, sentences: Iterable[Sentence]) -> AnnotatedDocument:
    """Rebuild a document from sentences in a new order.

    Sentence indices and token doc_offsets are recomputed to stay
    contiguous; within-sentence content is untouched.
    """
    raw = [([t.surface for t in s.tokens], s.mentions) for s in sentences]
    return AnnotatedDocument(doc_id, _build_sentences(raw))


def truncate_sentences(doc: AnnotatedDocument, max_terms: int = 60) -> AnnotatedDocument:
    """Cut every sentence to its first ``max_terms`` tokens.

    Mentions whose head token falls at or beyond the cut are dropped.
    Document-wide token offsets are recomputed to stay contiguous.
    """
    if max_terms <= 0:
        raise ValueError("max_terms must be positive")
    raw = []
    for s in doc.sentences:
        surfaces = [t.surface for t in s.tokens[:max_terms]]
        mentions = tuple(m for m in s.mentions if m.token_index < max_terms)
        raw.append((surfaces, mentions))
    return AnnotatedDocument(doc.doc_id, _build_sentences(raw))


def document_from_dict(
    obj: dict,
    strip_plural: bool = False,
    line_no: int | None = None,
) -> AnnotatedDocument:
    """Validate and build a document from a decoded interchange object."""
    if not isinstance(obj, dict):
        raise InterchangeError("document must be a JSON object", line_no)
    doc_id = obj.get("doc_id")
    if not isinstance(doc_id, str) or not doc_id:
        raise InterchangeError("doc_id must be a non-empty string", line_no)
    raw_sentences = obj.get("sentences", [])
    if not isinstance(raw_sentences, list):
        raise InterchangeError(f"{doc_id}: sentences must be a list", line_no)

    built = []
    for s_idx, raw in enumerate(raw_sentences):
        if not isinstance(raw, dict):
            raise InterchangeError(f"{doc_id}: sentence {s_idx} must be an object", line_no)
        surfaces = raw.get("tokens", [])
        if not isinstance(surfaces, list) or not all(isinstance(t, str) for t in surfaces):
            raise InterchangeError(
                f"{doc_id}: sentence {s_idx} tokens must be a list of strings", line_no
            )
        mentions = []
        for m_idx, m in enumerate(raw.get("mentions", [])):
            if not isinstance(m, dict):
                raise InterchangeError(
                    f"{doc_id}: sentence {s_idx} mention {m_idx} must be an object", line_no
                )
            role = m.get("role")
            if role not in ("s", "o"):
                log.debug("%s: ignoring mention with role %r", doc_id, role)
                continue
            entity = m.get("entity")
            if not isinstance(entity, str) or not entity:
                raise InterchangeError(
                    f"{doc_id}: sentence {s_idx} mention {m_idx} has no entity key", line_no
                )
            token_index = m.get("token_index")
            if not isinstance(token_index, int) or isinstance(token_index, bool):
                raise InterchangeError(
                    f"{doc_id}: sentence {s_idx} mention {m_idx} token_index must be an int",
                    line_no,
                )
            if not 0 <= token_index < len(surfaces):
                raise InterchangeError(
                    f"{doc_id}: sentence {s_idx} mention {m_idx} token_index {token_index} "
                    f"out of range for {len(surfaces)} tokens",
                    line_no,
                )
            mentions.append(
                EntityMention(
                    entity_id=normalize_entity(entity, strip_plural=strip_plural),
                    role=Role(role),
                    token_index=token_index,
                )
            )
        built.append((surfaces, mentions))
    return AnnotatedDocument(doc_id, _build_sentences(built))


def document_to_dict(doc: AnnotatedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "sentences": [
            {
                "tokens": [t.surface for t in s.tokens],
                "mentions": [
                    {"entity": m.entity_id, "role": m.role.value, "token_index": m.token_index}
                    for m in s.mentions
                ],
            }
            for s in doc.sentences
        ],
    }


def iter_documents(
    lines: Iterable[str], strip_plural: bool = False
) -> Iterator[AnnotatedDocument]:
    """Parse interchange JSONL lines; blank lines are skipped."""
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InterchangeError(f"invalid JSON: {exc.msg}", line_no) from exc
        yield document_from_dict(obj, strip_plural=strip_plural, line_no=line_no)


def load_documents(
    source: str | Path | TextIO, strip_plural: bool = False
) -> list[AnnotatedDocument]:
    """Load all documents from a JSONL path or open text stream."""
    if isinstance(source, (str, Path)):
        with io.open(source, "r", encoding="utf-8") as fp:
            return list(iter_documents(fp, strip_plural=strip_plural))
    return list(iter_documents(source, strip_plural=strip_plural))


def validate_document(doc: AnnotatedDocument) -> AnnotatedDocument:
    """Check structural invariants of an in-memory document.

    Used by API entry points that accept caller-constructed documents
    instead of interchange input.
    """
    if not doc.doc_id:
        raise ValueError("doc_id must be non-empty")
    offset = 0
    for position, sentence in enumerate(doc.sentences):
        if sentence.index != position:
            raise ValueError(
                f"{doc.doc_id}: sentence index {sentence.index} at position {position}"
            )
        for token in sentence.tokens:
            if token.doc_offset != offset:
                raise ValueError(
                    f"{doc.doc_id}: token offset {token.doc_offset}, expected {offset}"
                )
            offset += 1
        last = -1
        for mention in sentence.mentions:
            if not 0 <= mention.token_index < len(sentence.tokens):
                raise ValueError(
                    f"{doc.doc_id}: mention token_index {mention.token_index} out of range"
                )
            if mention.token_index < last:
                raise ValueError(f"{doc.doc_id}: mentions out of token order")
            last = mention.token_index
    return doc
