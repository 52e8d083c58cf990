"""Acceptance suite: one test per release criterion.

Each criterion prints a [PASS]/[FAIL] line (run with `pytest -s`) and
enforces its runtime budget. The web_corpus fixture (10k generated
English-like passages) is shared; its build time is charged to the
stop-word criterion, whose budget includes the stats build.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy import stats as scipy_stats

from pmimask import (
    ami,
    corrupt,
    count_ngrams,
    derive_rng,
    importance_mask,
    pmi,
    score_sentence,
)
from pmimask.analysis import masked_term_frequency, sampling_distribution, stopword_masked_fraction
from pmimask.bench import bench_masking
from pmimask.cli import main as cli_main
from pmimask.masking import ACTION_KEEP, ACTION_MASK, ACTION_RANDOM, mask_cardinality
from pmimask.stopwords import load_stopwords

from conftest import C0_SENTENCES
from corpusgen import write_corpus_jsonl
from oracle import oracle_scores, oracle_tables

LN_4_5 = math.log(4.5)


@contextmanager
def criterion(name, budget_seconds, extra_seconds=0.0):
    start = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start + extra_seconds
    assert elapsed < budget_seconds, f"{name}: {elapsed:.1f}s exceeded {budget_seconds}s budget"
    print(f"[PASS] {name} ({elapsed:.1f}s)")


def test_oracle_equivalence():
    with criterion("oracle equivalence (PMI/AMI)", 10):
        rng = np.random.default_rng(101)
        corpora = 0
        while corpora < 20:
            vocab_size = int(rng.integers(2, 9))
            vocab = [chr(ord("a") + i) for i in range(vocab_size)]
            corpus = [
                [vocab[int(j)] for j in rng.integers(0, vocab_size, size=rng.integers(1, 11))]
                for _ in range(int(rng.integers(1, 51)))
            ]
            for window in (2, 3, 4):
                stats = count_ngrams(corpus, window=window)
                tables, totals = oracle_tables(corpus, window)
                for words in corpus:
                    got = score_sentence(stats, words, window=window).scores
                    want = oracle_scores(tables, totals, words, window)
                    assert len(got) == len(want)
                    for g, w in zip(got, want):
                        assert abs(g - w) <= 1e-9
            corpora += 1


def test_worked_example(c0_stats):
    with criterion("worked example on C0", 10):
        assert abs(pmi(c0_stats, ("a", "b")) - LN_4_5) <= 1e-9
        scores = score_sentence(c0_stats, ["a", "b", "c"], window=2).scores
        expected = [LN_4_5, 2 * LN_4_5, LN_4_5]
        for got, want in zip(scores, expected):
            assert abs(got - want) <= 1e-9
        for i in range(3):
            assert abs(ami(c0_stats, ["a", "b", "c"], i, window=2) - expected[i]) <= 1e-9


def test_perturbed_topk_invariants():
    with criterion("perturbed top-k invariants (1000 random triples)", 5):
        rng = np.random.default_rng(102)
        for trial in range(1000):
            n = int(rng.integers(0, 50))
            mode = trial % 5
            ratio = 0.0 if mode == 0 else 1.0 if mode == 1 else float(rng.random())
            sigma = 0.0 if mode == 2 else float(rng.random() * 2)
            t = rng.normal(0.0, 2.0, n)
            mask = importance_mask(t, ratio, sigma, derive_rng(102, "alg", stream=trial))
            k = mask_cardinality(n, ratio)
            assert int(mask.sum()) == k
            if ratio == 0.0:
                assert not mask.any()
            if ratio == 1.0:
                assert mask.all() or n == 0
            if sigma == 0.0:
                expected = np.zeros(n, dtype=np.uint8)
                expected[np.argsort(-t, kind="stable")[:k]] = 1
                assert mask.tolist() == expected.tolist()


def test_monotone_masking_probability(web_corpus):
    with criterion("masking frequency monotone in importance (Spearman > 0.5)", 60):
        tested = 0
        for sentence in web_corpus.sentences:
            scores = score_sentence(web_corpus.stats, sentence).scores
            if len(set(scores)) < 8:
                continue
            freqs = sampling_distribution(
                sentence.words, scores, "importance", 0.5, 1.0, 10_000,
                seed=103, doc_id=sentence.doc_id,
            )
            rho = scipy_stats.spearmanr(freqs, scores).statistic
            assert rho > 0.5, f"Spearman {rho:.3f} on {sentence.doc_id}"
            tested += 1
            if tested == 6:
                break
        assert tested == 6


def test_uniform_masking_matches_term_frequency(web_corpus):
    with criterion("uniform masking ~ term-frequency sampling (TV < 0.02, top-10 equal)", 120):
        sentences, stats = web_corpus.sentences, web_corpus.stats
        per_pass = sum(mask_cardinality(len(s), 0.15) for s in sentences)
        trials = math.ceil(1_000_000 / per_pass)
        histogram = masked_term_frequency(sentences, stats, "uniform", 0.15, trials, seed=104)
        assert histogram.total_masked >= 1_000_000

        unigrams = stats.tables[1]
        masked = {w: c / histogram.total_masked for w, c in histogram.entries}
        tv = 0.5 * sum(
            abs(masked.get(w, 0.0) - c / unigrams.total) for w, c in unigrams.counts.items()
        )
        tv += 0.5 * sum(f for w, f in masked.items() if w not in unigrams.counts)
        assert tv < 0.02, f"total-variation distance {tv:.4f}"

        corpus_top10 = {
            w for w, _ in sorted(unigrams.counts.items(), key=lambda e: (-e[1], e[0]))[:10]
        }
        masked_top10 = {w for w, _ in histogram.top(10)}
        assert masked_top10 == corpus_top10


def test_stopword_masked_fraction(web_corpus):
    with criterion(
        "stop-word fraction: uniform in [0.30, 0.50], importance lower",
        600,
        extra_seconds=web_corpus.build_seconds,
    ):
        sentences, stats = web_corpus.sentences, web_corpus.stats
        assert len(sentences) >= 10_000
        stopword_set = load_stopwords()
        uniform = stopword_masked_fraction(
            sentences, stats, "uniform", 0.15, stopword_set, trials=3, seed=105
        )
        importance = stopword_masked_fraction(
            sentences, stats, "importance", 0.15, stopword_set, trials=3, seed=105
        )
        assert 0.30 <= uniform <= 0.50, f"uniform fraction {uniform:.4f}"
        assert importance < uniform, f"{importance:.4f} !< {uniform:.4f}"


def test_corruption_fractions():
    with criterion("80/10/10 corruption fractions (+/- 0.01 over 1e5 positions)", 10):
        n = 100_000
        plan = corrupt(["w"] * n, np.ones(n, dtype=np.uint8), ["v0", "v1"], derive_rng(106, "c"))
        fractions = {
            action: plan.actions.count(action) / n
            for action in (ACTION_MASK, ACTION_RANDOM, ACTION_KEEP)
        }
        assert abs(fractions[ACTION_MASK] - 0.8) <= 0.01
        assert abs(fractions[ACTION_RANDOM] - 0.1) <= 0.01
        assert abs(fractions[ACTION_KEEP] - 0.1) <= 0.01


def test_masking_latency():
    with criterion("selection latency: <= 10ms per 128x150 batch, n log n scaling", 60):
        short = bench_masking(seq_len=150, batch=128, trials=50, strategy="importance")
        assert short.mean_ms <= 10.0, f"mean {short.mean_ms:.2f}ms"
        long = bench_masking(seq_len=1200, batch=128, trials=30, strategy="importance")
        ratio = long.mean_ms / short.mean_ms
        assert ratio <= 12.0, f"150->1200 latency ratio {ratio:.1f}"


def test_determinism_and_sharding(tmp_path):
    with criterion("shard-count and run-to-run determinism", 120):
        corpus = tmp_path / "corpus.jsonl"
        write_corpus_jsonl(corpus, 1200, seed=9)

        s1, s4 = tmp_path / "s1.stats", tmp_path / "s4.stats"
        assert cli_main(["build-stats", "--input", str(corpus), "--output", str(s1), "--shards", "1"]) == 0
        assert cli_main(["build-stats", "--input", str(corpus), "--output", str(s4), "--shards", "4"]) == 0
        assert s1.read_bytes() == s4.read_bytes()
        crc1 = s1.read_bytes().rsplit(b"#CRC32\t", 1)[1]
        crc4 = s4.read_bytes().rsplit(b"#CRC32\t", 1)[1]
        assert crc1 == crc4

        base = ["mask-pair", "--stats", str(s1), "--seed", "42"]
        m1, m2 = tmp_path / "m1.jsonl", tmp_path / "m2.jsonl"
        assert cli_main(base + ["--input", str(corpus), "--output", str(m1)]) == 0
        assert cli_main(base + ["--input", str(corpus), "--output", str(m2)]) == 0
        assert m1.read_bytes() == m2.read_bytes()

        reordered = tmp_path / "reordered.jsonl"
        lines = corpus.read_text(encoding="utf-8").splitlines()
        reordered.write_text("\n".join(reversed(lines)) + "\n", encoding="utf-8")
        m3 = tmp_path / "m3.jsonl"
        assert cli_main(base + ["--input", str(reordered), "--output", str(m3)]) == 0
        assert sorted(m1.read_text(encoding="utf-8").splitlines()) == sorted(
            m3.read_text(encoding="utf-8").splitlines()
        )
