"""Corpus ingestion and word-level tokenization.

Documents are streamed from JSONL ({"id", "text"} per line), TSV
(id<TAB>text) or plain text (one document per line, 1-based line numbers
as ids). Tokenization lowercases, splits on Unicode whitespace and splits
every punctuation character off as its own word, so punctuation takes
part in all downstream frequency statistics.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import CorpusFormatError, UsageError

CORPUS_FORMATS = ("jsonl", "tsv", "plain")

_punct_cache: dict[str, bool] = {}


def _is_punct(ch: str) -> bool:
    flag = _punct_cache.get(ch)
    if flag is None:
        flag = unicodedata.category(ch).startswith("P")
        _punct_cache[ch] = flag
    return flag


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split text into word tokens.

    Pure and deterministic: lowercase (unless disabled), split on Unicode
    whitespace, then split each punctuation character off as a standalone
    token. Digits are ordinary word characters.
    """
    if lowercase:
        text = text.lower()
    words: list[str] = []
    for chunk in text.split():
        start = 0
        for i, ch in enumerate(chunk):
            if _is_punct(ch):
                if start < i:
                    words.append(chunk[start:i])
                words.append(ch)
                start = i + 1
        if start < len(chunk):
            words.append(chunk[start:])
    return words


@dataclass(frozen=True)
class Document:
    """One raw corpus record. `id` must be unique within a corpus run."""

    id: str
    text: str


@dataclass(frozen=True)
class TokenizedSentence:
    doc_id: str
    words: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.words)


def tokenize_document(doc: Document, lowercase: bool = True) -> TokenizedSentence:
    return TokenizedSentence(doc_id=doc.id, words=tuple(tokenize(doc.text, lowercase)))


class CorpusReader:
    """Streaming single-consumer reader over a corpus file.

    `on_error="raise"` aborts on the first malformed record;
    `on_error="skip"` drops it and counts it in `self.skipped`.
    Invalid UTF-8 always raises, naming the absolute byte offset.
    """

    def __init__(self, path: str | Path, format: str = "jsonl", on_error: str = "raise"):
        if format not in CORPUS_FORMATS:
            raise UsageError(f"unknown corpus format {format!r}, expected one of {CORPUS_FORMATS}")
        if on_error not in ("raise", "skip"):
            raise UsageError(f"on_error must be 'raise' or 'skip', got {on_error!r}")
        self.path = Path(path)
        self.format = format
        self.on_error = on_error
        self.skipped = 0

    def __iter__(self) -> Iterator[Document]:
        offset = 0
        with open(self.path, "rb") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line_start = offset
                offset += len(raw)
                raw = raw.rstrip(b"\r\n")
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError as exc:
                    raise CorpusFormatError(
                        f"{self.path}: invalid UTF-8 at byte {line_start + exc.start} (line {lineno})"
                    ) from exc
                try:
                    yield self._parse(line, lineno)
                except CorpusFormatError:
                    if self.on_error == "skip":
                        self.skipped += 1
                        continue
                    raise

    def _parse(self, line: str, lineno: int) -> Document:
        if self.format == "plain":
            return Document(id=str(lineno), text=line)
        if self.format == "tsv":
            doc_id, sep, text = line.partition("\t")
            if not sep:
                raise CorpusFormatError(f"{self.path}:{lineno}: expected id<TAB>text")
            return Document(id=doc_id, text=text)
        # jsonl
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{self.path}:{lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(record, dict) or "id" not in record or "text" not in record:
            raise CorpusFormatError(f'{self.path}:{lineno}: expected an object with "id" and "text"')
        doc_id, text = record["id"], record["text"]
        if not isinstance(doc_id, str) or not isinstance(text, str):
            raise CorpusFormatError(f'{self.path}:{lineno}: "id" and "text" must be strings')
        return Document(id=doc_id, text=text)


def read_corpus(path: str | Path, format: str = "jsonl", on_error: str = "raise") -> CorpusReader:
    """Open a corpus for streaming. Returns a re-iterable reader."""
    return CorpusReader(path, format=format, on_error=on_error)


def read_sentences(
    path: str | Path, format: str = "jsonl", lowercase: bool = True, on_error: str = "raise"
) -> Iterator[TokenizedSentence]:
    """Stream tokenized sentences straight from a corpus file."""
    for doc in read_corpus(path, format=format, on_error=on_error):
        yield tokenize_document(doc, lowercase=lowercase)
