"""Corpus-level analyses of masking behavior.

Everything here is Monte Carlo over derived per-(document, trial) seeds,
so results are a pure function of (corpus, stats, seed) and independent
of worker scheduling or document order.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import TokenizedSentence
from .errors import UsageError
from .importance import score_sentence
from .masking import derive_rng, importance_mask, mask_cardinality, uniform_mask
from .ngrams import CorpusStats, resolve_workers
from .stopwords import is_stopword


@dataclass
class TermHistogram:
    """Masked-term counts, sorted by count descending then word bytes."""

    entries: list[tuple[str, int]]
    total_masked: int

    def top(self, k: int) -> list[tuple[str, int]]:
        return self.entries[:k]


def _prepare(
    sentences: Iterable[TokenizedSentence],
    stats: CorpusStats | None,
    strategy: str,
    window: int | None,
) -> list[tuple[str, tuple[str, ...], list[float] | None]]:
    if strategy not in ("uniform", "importance"):
        raise UsageError(f"unknown strategy {strategy!r}")
    if strategy == "importance" and stats is None:
        raise UsageError("importance strategy requires corpus stats")
    prepared = []
    for sentence in sentences:
        scores = None
        if strategy == "importance":
            scores = score_sentence(stats, sentence, window=window).scores
        prepared.append((sentence.doc_id, sentence.words, scores))
    return prepared


def _mask_indices(
    n: int, scores: list[float] | None, strategy: str, ratio: float, sigma: float, rng
) -> np.ndarray:
    if strategy == "uniform":
        return np.flatnonzero(uniform_mask(n, ratio, rng))
    return np.flatnonzero(importance_mask(scores, ratio, sigma, rng))


def masked_term_frequency(
    sentences: Iterable[TokenizedSentence],
    stats: CorpusStats | None,
    strategy: str,
    ratio: float,
    trials: int,
    seed: int = 42,
    sigma: float = 1.0,
    window: int | None = None,
) -> TermHistogram:
    """Histogram of which words get masked over `trials` runs per sentence."""
    if not 0.0 < ratio <= 1.0:
        raise UsageError(f"ratio must be in (0, 1], got {ratio}")
    if trials < 1:
        raise UsageError(f"trials must be >= 1, got {trials}")
    prepared = _prepare(sentences, stats, strategy, window)

    def count_chunk(chunk) -> Counter:
        counter: Counter = Counter()
        for doc_id, words, scores in chunk:
            n = len(words)
            if mask_cardinality(n, ratio) == 0:
                continue
            for trial in range(trials):
                rng = derive_rng(seed, doc_id, stream=trial)
                for i in _mask_indices(n, scores, strategy, ratio, sigma, rng):
                    counter[words[i]] += 1
        return counter

    workers = resolve_workers(len(prepared))
    if workers > 1 and len(prepared) > 1:
        chunks = [prepared[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counters = list(pool.map(count_chunk, chunks))
        counts: Counter = Counter()
        for c in counters:
            counts.update(c)
    else:
        counts = count_chunk(prepared)

    entries = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return TermHistogram(entries=entries, total_masked=sum(counts.values()))


def stopword_masked_fraction(
    sentences: Iterable[TokenizedSentence],
    stats: CorpusStats | None,
    strategy: str,
    ratio: float,
    stopword_set: frozenset[str],
    trials: int,
    seed: int = 42,
    sigma: float = 1.0,
    window: int | None = None,
) -> float:
    """Fraction of masked word occurrences that are stop-words or punctuation."""
    histogram = masked_term_frequency(
        sentences, stats, strategy, ratio, trials, seed=seed, sigma=sigma, window=window
    )
    if histogram.total_masked == 0:
        return 0.0
    stop = sum(count for word, count in histogram.entries if is_stopword(word, stopword_set))
    return stop / histogram.total_masked


def sampling_distribution(
    words: Sequence[str],
    scores: Sequence[float] | None,
    strategy: str,
    ratio: float,
    sigma: float,
    trials: int,
    seed: int = 42,
    doc_id: str = "",
) -> np.ndarray:
    """Per-position empirical masking frequency over `trials` seeds."""
    if trials < 1000:
        raise UsageError(f"need at least 1000 trials for a stable estimate, got {trials}")
    if strategy not in ("uniform", "importance"):
        raise UsageError(f"unknown strategy {strategy!r}")
    if strategy == "importance" and scores is None:
        raise UsageError("importance strategy requires a score vector")
    n = len(words)
    hits = np.zeros(n, dtype=np.int64)
    for trial in range(trials):
        rng = derive_rng(seed, doc_id, stream=trial)
        if strategy == "uniform":
            hits += uniform_mask(n, ratio, rng)
        else:
            hits += importance_mask(scores, ratio, sigma, rng)
    return hits / trials
