"""Stop-word detection: a fixed English list shipped with the package,
plus the rule that any word made entirely of punctuation counts."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .corpus import _is_punct


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load the shipped stop-word list, or a custom one-word-per-line file."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("pmimask").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w for w in (line.strip() for line in text.splitlines()) if w)


def is_punctuation_word(word: str) -> bool:
    return bool(word) and all(_is_punct(ch) for ch in word)


def is_stopword(word: str, stopword_set: frozenset[str]) -> bool:
    return word in stopword_set or is_punctuation_word(word)
