"""Per-word importance from pointwise mutual information.

PMI of a gram g = (w_1..w_n) is ln(p(g) / prod_i p(w_i)), the standard
specific-correlation generalization of the bigram case. A gram with zero
joint or zero marginal probability has no PMI (UNDEFINED, returned as
None) and is skipped by the windowed average below.

The importance of word i is the sum of two sides: the mean PMI of the
grams of orders 2..L ending at i, plus the mean PMI of the grams starting
at i. Each side averages only its DEFINED, in-bounds terms; a side with
none contributes 0, which keeps boundary words on the same scale as
interior words and guarantees every score is finite. Natural-log units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import TokenizedSentence
from .errors import UsageError
from .ngrams import SEP, CorpusStats


@dataclass
class ImportanceProfile:
    """One finite score per word of a tokenized sentence."""

    doc_id: str
    scores: list[float]

    def __len__(self) -> int:
        return len(self.scores)


def pmi(stats: CorpusStats, gram: Sequence[str]) -> float | None:
    """PMI of a gram of length 2..window, or None when undefined."""
    order = len(gram)
    if order < 2 or order > stats.window:
        raise UsageError(f"pmi needs a gram of length 2..{stats.window}, got {order}")
    p_joint = stats.probability(gram)
    if p_joint == 0.0:
        return None
    log_marginals = 0.0
    for word in gram:
        p_word = stats.probability((word,))
        if p_word == 0.0:
            return None
        log_marginals += math.log(p_word)
    return math.log(p_joint) - log_marginals


def _side_mean(terms: list[float], window: int, fixed_denominator: bool) -> float:
    if fixed_denominator:
        return sum(terms) / (window - 1)
    if not terms:
        return 0.0
    return sum(terms) / len(terms)


def ami(
    stats: CorpusStats,
    sentence: TokenizedSentence | Sequence[str],
    i: int,
    window: int | None = None,
    fixed_denominator: bool = False,
) -> float:
    """Windowed average mutual information of the word at position i.

    `fixed_denominator=True` divides each side by window-1 regardless of
    how many terms were available (the alternative normalization at
    sentence boundaries); the default renormalizes over available terms.
    """
    words = sentence.words if isinstance(sentence, TokenizedSentence) else sentence
    window = stats.window if window is None else window
    if window < 2 or window > stats.window:
        raise UsageError(f"window must be in 2..{stats.window}, got {window}")
    if i < 0 or i >= len(words):
        raise UsageError(f"word index {i} out of range for sentence of {len(words)} words")
    left: list[float] = []
    right: list[float] = []
    for j in range(1, window):
        if i - j >= 0:
            value = pmi(stats, words[i - j : i + 1])
            if value is not None:
                left.append(value)
        if i + j < len(words):
            value = pmi(stats, words[i : i + j + 1])
            if value is not None:
                right.append(value)
    return _side_mean(left, window, fixed_denominator) + _side_mean(right, window, fixed_denominator)


def score_sentence(
    stats: CorpusStats,
    sentence: TokenizedSentence | Sequence[str],
    window: int | None = None,
    fixed_denominator: bool = False,
) -> ImportanceProfile:
    """Score every position of a sentence; scores[i] == ami(stats, s, i).

    Each contiguous gram's PMI is computed once and shared between the
    position it ends at and the position it starts at, so the cost is one
    table lookup per (position, order) pair.
    """
    if isinstance(sentence, TokenizedSentence):
        doc_id, words = sentence.doc_id, sentence.words
    else:
        doc_id, words = "", tuple(sentence)
    window = stats.window if window is None else window
    if window < 2 or window > stats.window:
        raise UsageError(f"window must be in 2..{stats.window}, got {window}")
    n = len(words)
    if n == 0:
        return ImportanceProfile(doc_id=doc_id, scores=[])

    unigram_log: list[float | None] = []
    for w in words:
        p = stats.probability((w,))
        unigram_log.append(math.log(p) if p > 0.0 else None)

    # gram_pmi[(start, order)] -> PMI or None, for orders 2..window
    gram_pmi: dict[tuple[int, int], float | None] = {}
    for order in range(2, window + 1):
        table = stats.tables[order]
        total = table.total
        counts = table.counts
        for start in range(n - order + 1):
            span = unigram_log[start : start + order]
            if total == 0 or None in span:
                gram_pmi[(start, order)] = None
                continue
            count = counts.get(SEP.join(words[start : start + order]), 0)
            if count == 0:
                gram_pmi[(start, order)] = None
                continue
            gram_pmi[(start, order)] = math.log(count / total) - sum(span)  # type: ignore[arg-type]

    scores: list[float] = []
    for i in range(n):
        left = [
            v
            for j in range(1, window)
            if i - j >= 0 and (v := gram_pmi[(i - j, j + 1)]) is not None
        ]
        right = [
            v
            for j in range(1, window)
            if i + j < n and (v := gram_pmi[(i, j + 1)]) is not None
        ]
        scores.append(
            _side_mean(left, window, fixed_denominator)
            + _side_mean(right, window, fixed_denominator)
        )
    return ImportanceProfile(doc_id=doc_id, scores=scores)
