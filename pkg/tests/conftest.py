import time
from types import SimpleNamespace

import pytest

from pmimask import count_ngrams, read_sentences

from corpusgen import write_corpus_jsonl

C0_SENTENCES = [["a", "b", "c"], ["a", "b", "d"]]


@pytest.fixture(scope="session")
def c0_stats():
    return count_ngrams(C0_SENTENCES, window=2)


@pytest.fixture(scope="session")
def web_corpus(tmp_path_factory):
    """10k generated English-like passages with stats built over them.

    Built once per session; build_seconds is charged to the acceptance
    criterion that includes the stats build in its budget.
    """
    root = tmp_path_factory.mktemp("webcorpus")
    path = root / "passages.jsonl"
    start = time.perf_counter()
    write_corpus_jsonl(path, 10000, seed=7)
    sentences = list(read_sentences(path, format="jsonl"))
    stats = count_ngrams(sentences, window=4)
    build_seconds = time.perf_counter() - start
    return SimpleNamespace(
        path=path, sentences=sentences, stats=stats, build_seconds=build_seconds
    )
