import numpy as np
import pytest
from scipy import stats as scipy_stats

from pmimask import UsageError, count_ngrams, score_sentence, tokenize
from pmimask.analysis import masked_term_frequency, sampling_distribution, stopword_masked_fraction
from pmimask.corpus import TokenizedSentence
from pmimask.masking import mask_cardinality
from pmimask.stopwords import is_punctuation_word, is_stopword, load_stopwords

from corpusgen import CONTRAST_SENTENCE, generate_passages


def _sentences(texts):
    return [
        TokenizedSentence(doc_id=f"d{i}", words=tuple(tokenize(t))) for i, t in enumerate(texts)
    ]


@pytest.fixture(scope="module")
def gen_corpus():
    sentences = _sentences(generate_passages(2500, seed=7))
    stats = count_ngrams(sentences, window=4)
    return sentences, stats


class TestMaskedTermFrequency:
    def test_frequency_proportional_single_sentence(self):
        sentences = _sentences(["a a a b"])
        stats = count_ngrams(sentences, window=2)
        histogram = masked_term_frequency(sentences, stats, "uniform", 0.25, trials=4000, seed=1)
        assert histogram.total_masked == 4000
        share = dict(histogram.entries)["a"] / histogram.total_masked
        assert share == pytest.approx(0.75, abs=0.02)

    def test_histogram_conservation(self, gen_corpus):
        sentences, stats = gen_corpus
        trials, ratio = 3, 0.15
        histogram = masked_term_frequency(sentences[:400], stats, "uniform", ratio, trials, seed=5)
        expected = trials * sum(mask_cardinality(len(s), ratio) for s in sentences[:400])
        assert histogram.total_masked == expected
        assert sum(c for _, c in histogram.entries) == expected

    def test_entries_sorted_by_count_then_word(self, gen_corpus):
        sentences, stats = gen_corpus
        histogram = masked_term_frequency(sentences[:300], stats, "uniform", 0.15, trials=2, seed=5)
        assert histogram.entries == sorted(histogram.entries, key=lambda e: (-e[1], e[0]))

    def test_uniform_tracks_unigram_distribution(self, gen_corpus):
        sentences, stats = gen_corpus
        trials = max(1, 200_000 // sum(mask_cardinality(len(s), 0.15) for s in sentences))
        histogram = masked_term_frequency(sentences, stats, "uniform", 0.15, trials, seed=6)
        unigrams = stats.tables[1]
        masked = {w: c / histogram.total_masked for w, c in histogram.entries}
        tv = 0.5 * sum(
            abs(masked.get(w, 0.0) - count / unigrams.total) for w, count in unigrams.counts.items()
        )
        tv += 0.5 * sum(f for w, f in masked.items() if w not in unigrams.counts)
        assert tv < 0.04

    def test_importance_prefers_high_ami_words(self, gen_corpus):
        sentences, stats = gen_corpus
        from pmimask.analysis import _mask_indices
        from pmimask.masking import derive_rng

        all_scores, masked_scores = [], []
        for s in sentences[:500]:
            scores = score_sentence(stats, s).scores
            all_scores.extend(scores)
            for trial in range(2):
                rng = derive_rng(7, s.doc_id, stream=trial)
                for i in _mask_indices(len(s), scores, "importance", 0.15, 1.0, rng):
                    masked_scores.append(scores[i])
        assert np.mean(masked_scores) > np.mean(all_scores)

    def test_requires_stats_for_importance(self):
        with pytest.raises(UsageError):
            masked_term_frequency(_sentences(["a b"]), None, "importance", 0.15, trials=1)

    def test_ratio_must_be_positive(self, gen_corpus):
        sentences, stats = gen_corpus
        with pytest.raises(UsageError):
            masked_term_frequency(sentences[:2], stats, "uniform", 0.0, trials=1)

    def test_deterministic(self, gen_corpus):
        sentences, stats = gen_corpus
        one = masked_term_frequency(sentences[:100], stats, "uniform", 0.15, trials=3, seed=9)
        two = masked_term_frequency(sentences[:100], stats, "uniform", 0.15, trials=3, seed=9)
        assert one.entries == two.entries


class TestStopwordFraction:
    def test_no_stopwords_means_zero(self):
        sentences = _sentences(["rocket engine nozzle thrust chamber"])
        stats = count_ngrams(sentences, window=2)
        fraction = stopword_masked_fraction(
            sentences, stats, "uniform", 0.4, load_stopwords(), trials=50, seed=3
        )
        assert fraction == 0.0

    def test_uniform_near_corpus_stop_mass(self, gen_corpus):
        sentences, stats = gen_corpus
        stopword_set = load_stopwords()
        mass = sum(
            1 for s in sentences for w in s.words if is_stopword(w, stopword_set)
        ) / sum(len(s) for s in sentences)
        fraction = stopword_masked_fraction(
            sentences, stats, "uniform", 0.15, stopword_set, trials=3, seed=4
        )
        assert fraction == pytest.approx(mass, abs=0.03)

    def test_importance_strictly_lower_than_uniform(self, gen_corpus):
        sentences, stats = gen_corpus
        stopword_set = load_stopwords()
        uniform = stopword_masked_fraction(
            sentences, stats, "uniform", 0.15, stopword_set, trials=2, seed=4
        )
        importance = stopword_masked_fraction(
            sentences, stats, "importance", 0.15, stopword_set, trials=2, seed=4
        )
        assert importance < uniform

    def test_punctuation_rule(self):
        assert is_punctuation_word(".")
        assert is_punctuation_word("...")
        assert not is_punctuation_word("a.")
        assert not is_punctuation_word("")
        assert is_stopword(")", frozenset())


class TestSamplingDistribution:
    def test_uniform_is_flat(self):
        words = ["w"] * 13
        freqs = sampling_distribution(words, None, "uniform", 0.3, 1.0, 10_000, seed=8)
        assert freqs.shape == (13,)
        assert np.all(np.abs(freqs - 3 / 13) < 0.02)

    def test_trials_floor_enforced(self):
        with pytest.raises(UsageError):
            sampling_distribution(["a", "b"], None, "uniform", 0.5, 1.0, 999)

    def test_importance_rank_correlates_with_scores(self, gen_corpus):
        sentences, stats = gen_corpus
        tested = 0
        for s in sentences:
            scores = score_sentence(stats, s).scores
            if len(set(scores)) < 8:
                continue
            freqs = sampling_distribution(
                s.words, scores, "importance", 0.5, 1.0, 2000, seed=10, doc_id=s.doc_id
            )
            rho = scipy_stats.spearmanr(freqs, scores).statistic
            assert rho > 0.5
            tested += 1
            if tested == 5:
                break
        assert tested == 5

    def test_informative_words_masked_more(self, gen_corpus):
        _, stats = gen_corpus
        words = tokenize(CONTRAST_SENTENCE)
        scores = score_sentence(stats, words).scores
        freqs = sampling_distribution(words, scores, "importance", 0.3, 1.0, 10_000, seed=11)
        by_word = dict(zip(words, freqs))
        for content in ("crossword", "puzzle", "clue"):
            for stop in ("is", "a", "that", "we", "have"):
                assert by_word[content] > by_word[stop]

    def test_deterministic(self):
        words = ["u", "v", "w", "x"]
        scores = [0.1, 0.4, 0.2, 0.9]
        one = sampling_distribution(words, scores, "importance", 0.5, 1.0, 1000, seed=12)
        two = sampling_distribution(words, scores, "importance", 0.5, 1.0, 1000, seed=12)
        assert np.array_equal(one, two)
