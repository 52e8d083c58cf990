"""pmimask: corpus n-gram statistics, PMI-based word importance, and
importance-aware masking for masked-language-modeling data preparation."""

__version__ = "0.1.0"

from .corpus import Document, TokenizedSentence, read_corpus, read_sentences, tokenize, tokenize_document
from .errors import (
    ConfigurationError,
    CorpusFormatError,
    DataFormatError,
    PmimaskError,
    StatsChecksumError,
    StatsFormatError,
    StatsTruncatedError,
    StatsVersionError,
    UsageError,
)
from .importance import ImportanceProfile, ami, pmi, score_sentence
from .masking import (
    MaskedPair,
    MaskingConfig,
    MaskPlan,
    corrupt,
    derive_rng,
    derive_seed,
    importance_mask,
    mask_pair,
    mask_sentence,
    uniform_mask,
)
from .ngrams import (
    CorpusStats,
    NGramTable,
    build_stats,
    count_ngrams,
    load_stats,
    merge_stats,
    save_stats,
)

__all__ = [
    "Document",
    "TokenizedSentence",
    "read_corpus",
    "read_sentences",
    "tokenize",
    "tokenize_document",
    "CorpusStats",
    "NGramTable",
    "build_stats",
    "count_ngrams",
    "merge_stats",
    "save_stats",
    "load_stats",
    "ImportanceProfile",
    "pmi",
    "ami",
    "score_sentence",
    "MaskingConfig",
    "MaskPlan",
    "MaskedPair",
    "uniform_mask",
    "importance_mask",
    "corrupt",
    "mask_sentence",
    "mask_pair",
    "derive_seed",
    "derive_rng",
    "PmimaskError",
    "UsageError",
    "ConfigurationError",
    "DataFormatError",
    "CorpusFormatError",
    "StatsFormatError",
    "StatsVersionError",
    "StatsChecksumError",
    "StatsTruncatedError",
]
