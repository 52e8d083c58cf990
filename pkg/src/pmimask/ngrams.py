"""N-gram count tables over a tokenized corpus.

One table per order 1..window; probabilities are normalized within each
order (count_n(gram) / total_n). Counts are plain integers so shard
merges and file round-trips are bit-exact. Grams never cross document
boundaries.

Stats file format (v1, deterministic, UTF-8, LF newlines):

    #PMIMASK<TAB>v1<TAB>L=<n><TAB>docs=<N><TAB>lowercase=<0|1>
    #ORDER<TAB><n><TAB>total=<T>
    <gram words joined by U+001F><TAB><count>      (sorted by gram bytes)
    ...
    #CRC32<TAB><hex>                                (over all preceding bytes)

U+001F can never occur inside a word because the tokenizer splits on
Unicode whitespace and Python treats U+001F as whitespace.
"""

from __future__ import annotations

import os
import zlib
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import TokenizedSentence
from .errors import (
    ConfigurationError,
    StatsChecksumError,
    StatsFormatError,
    StatsTruncatedError,
    StatsVersionError,
    UsageError,
)

SEP = "\x1f"
MAGIC = "#PMIMASK"
FORMAT_VERSION = "v1"
DEFAULT_WINDOW = 4


def resolve_workers(requested: int) -> int:
    """Cap a worker count by PMIMASK_THREADS (or the CPU count)."""
    cap_env = os.environ.get("PMIMASK_THREADS")
    if cap_env:
        try:
            cap = max(1, int(cap_env))
        except ValueError:
            raise UsageError(f"PMIMASK_THREADS must be an integer, got {cap_env!r}")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(requested, cap))


@dataclass
class NGramTable:
    """Counts for one gram order; `total` is the number of gram positions
    in the corpus (sum over documents of max(0, len - order + 1))."""

    order: int
    counts: dict[str, int] = field(default_factory=dict)
    total: int = 0

    def add_sentence(self, words: Sequence[str]) -> None:
        n = self.order
        span = len(words) - n + 1
        if span <= 0:
            return
        counts = self.counts
        if n == 1:
            for w in words:
                counts[w] = counts.get(w, 0) + 1
        else:
            for i in range(span):
                key = SEP.join(words[i : i + n])
                counts[key] = counts.get(key, 0) + 1
        self.total += span

    def count(self, gram: Sequence[str]) -> int:
        return self.counts.get(SEP.join(gram), 0)


@dataclass
class CorpusStats:
    """Immutable-after-build probability model behind PMI."""

    window: int
    tables: dict[int, NGramTable]
    doc_count: int = 0
    lowercase: bool = True
    version: str = FORMAT_VERSION

    def __post_init__(self) -> None:
        if self.window < 2:
            raise UsageError(f"window must be >= 2, got {self.window}")
        for n in range(1, self.window + 1):
            if n not in self.tables:
                raise UsageError(f"missing order-{n} table for window {self.window}")

    @classmethod
    def empty(cls, window: int = DEFAULT_WINDOW, lowercase: bool = True) -> "CorpusStats":
        tables = {n: NGramTable(order=n) for n in range(1, window + 1)}
        return cls(window=window, tables=tables, doc_count=0, lowercase=lowercase)

    def add_sentence(self, words: Sequence[str]) -> None:
        for table in self.tables.values():
            table.add_sentence(words)
        self.doc_count += 1

    def probability(self, gram: Sequence[str]) -> float:
        """count(gram) / total for the gram's own order; unseen grams are 0."""
        order = len(gram)
        if order < 1 or order > self.window:
            raise UsageError(f"gram order {order} outside 1..{self.window}")
        table = self.tables[order]
        if table.total == 0:
            return 0.0
        return table.count(gram) / table.total

    def vocabulary(self) -> list[str]:
        """Sorted unigram vocabulary (deterministic replacement pool)."""
        return sorted(self.tables[1].counts)

    def word_count(self) -> int:
        return self.tables[1].total

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorpusStats):
            return NotImplemented
        return (
            self.window == other.window
            and self.doc_count == other.doc_count
            and self.lowercase == other.lowercase
            and self.version == other.version
            and {n: (t.total, t.counts) for n, t in self.tables.items()}
            == {n: (t.total, t.counts) for n, t in other.tables.items()}
        )


def count_ngrams(
    sentences: Iterable[TokenizedSentence | Sequence[str]],
    window: int = DEFAULT_WINDOW,
    lowercase: bool = True,
) -> CorpusStats:
    """Single-pass count of all orders 1..window over a sentence stream."""
    stats = CorpusStats.empty(window=window, lowercase=lowercase)
    for sentence in sentences:
        words = sentence.words if isinstance(sentence, TokenizedSentence) else sentence
        stats.add_sentence(words)
    return stats


def merge_stats(a: CorpusStats, b: CorpusStats) -> CorpusStats:
    """Element-wise sum of two shard-local stats (associative, commutative)."""
    if a.window != b.window:
        raise ConfigurationError(f"window mismatch: {a.window} vs {b.window}")
    if a.lowercase != b.lowercase:
        raise ConfigurationError("tokenizer flag mismatch: lowercase differs")
    if a.version != b.version:
        raise ConfigurationError(f"format version mismatch: {a.version} vs {b.version}")
    merged = CorpusStats.empty(window=a.window, lowercase=a.lowercase)
    merged.doc_count = a.doc_count + b.doc_count
    for n in range(1, a.window + 1):
        ta, tb = a.tables[n], b.tables[n]
        counter = Counter(ta.counts)
        counter.update(tb.counts)
        merged.tables[n] = NGramTable(order=n, counts=dict(counter), total=ta.total + tb.total)
    return merged


def prune_stats(stats: CorpusStats, min_count: int) -> CorpusStats:
    """Drop grams below min_count. Totals keep their true corpus values so
    surviving grams' probabilities are unchanged; pruned grams become 0."""
    if min_count <= 1:
        return stats
    for table in stats.tables.values():
        table.counts = {g: c for g, c in table.counts.items() if c >= min_count}
    return stats


def build_stats(
    documents: Iterable,
    window: int = DEFAULT_WINDOW,
    lowercase: bool = True,
    min_count: int = 1,
    shards: int = 1,
) -> CorpusStats:
    """Tokenize and count a document stream, optionally across shard workers.

    Documents are assigned round-robin to shards; each shard counts
    independently and the results are merged, so the output is identical
    to a single-pass count for any shard count. Pruning runs after the
    merge so shard boundaries cannot change it.
    """
    from .corpus import tokenize_document

    if shards < 1:
        raise UsageError(f"shards must be >= 1, got {shards}")
    if min_count < 1:
        raise UsageError(f"min-count must be >= 1, got {min_count}")

    if shards == 1:
        stats = CorpusStats.empty(window=window, lowercase=lowercase)
        for doc in documents:
            stats.add_sentence(tokenize_document(doc, lowercase=lowercase).words)
        return prune_stats(stats, min_count)

    buckets: list[list] = [[] for _ in range(shards)]
    for i, doc in enumerate(documents):
        buckets[i % shards].append(doc)

    def count_shard(bucket: list) -> CorpusStats:
        shard = CorpusStats.empty(window=window, lowercase=lowercase)
        for doc in bucket:
            shard.add_sentence(tokenize_document(doc, lowercase=lowercase).words)
        return shard

    with ThreadPoolExecutor(max_workers=resolve_workers(shards)) as pool:
        shard_stats = list(pool.map(count_shard, buckets))

    merged = shard_stats[0]
    for other in shard_stats[1:]:
        merged = merge_stats(merged, other)
    return prune_stats(merged, min_count)


def save_stats(stats: CorpusStats, path: str | Path) -> None:
    """Write the deterministic v1 stats file (see module docstring)."""
    crc = 0
    with open(path, "wb") as fh:

        def emit(line: str) -> None:
            nonlocal crc
            data = line.encode("utf-8")
            crc = zlib.crc32(data, crc)
            fh.write(data)

        emit(
            f"{MAGIC}\t{stats.version}\tL={stats.window}\tdocs={stats.doc_count}"
            f"\tlowercase={int(stats.lowercase)}\n"
        )
        for n in range(1, stats.window + 1):
            table = stats.tables[n]
            emit(f"#ORDER\t{n}\ttotal={table.total}\n")
            for gram in sorted(table.counts):
                emit(f"{gram}\t{table.counts[gram]}\n")
        fh.write(f"#CRC32\t{crc:08x}\n".encode("utf-8"))


def _parse_header(line: str) -> tuple[str, int, int, bool]:
    fields = line.split("\t")
    if not fields or fields[0] != MAGIC:
        raise StatsFormatError(f"bad magic: expected {MAGIC!r} header")
    if len(fields) != 5:
        raise StatsFormatError(f"malformed header: expected 5 fields, got {len(fields)}")
    version = fields[1]
    if version != FORMAT_VERSION:
        raise StatsVersionError(f"unsupported stats version {version!r} (expected {FORMAT_VERSION!r})")
    try:
        window = int(fields[2].removeprefix("L="))
        docs = int(fields[3].removeprefix("docs="))
        lowercase = bool(int(fields[4].removeprefix("lowercase=")))
    except ValueError as exc:
        raise StatsFormatError(f"malformed header field: {exc}") from exc
    return version, window, docs, lowercase


def load_stats(path: str | Path) -> CorpusStats:
    """Load and verify a stats file; inverse of save_stats."""
    data = Path(path).read_bytes()
    first_nl = data.find(b"\n")
    header_bytes = data[: first_nl if first_nl >= 0 else len(data)]
    try:
        header = header_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise StatsFormatError(f"{path}: header is not valid UTF-8") from exc
    version, window, docs, lowercase = _parse_header(header)

    marker = b"\n#CRC32\t"
    pos = data.rfind(marker)
    if pos < 0:
        raise StatsTruncatedError(f"{path}: missing #CRC32 trailer (file truncated?)")
    body = data[: pos + 1]
    trailer = data[pos + 1 :].rstrip(b"\n").decode("utf-8", errors="replace")
    try:
        expected_crc = int(trailer.split("\t", 1)[1], 16)
    except (IndexError, ValueError) as exc:
        raise StatsTruncatedError(f"{path}: malformed #CRC32 trailer") from exc
    actual_crc = zlib.crc32(body)
    if actual_crc != expected_crc:
        raise StatsChecksumError(
            f"{path}: checksum mismatch (file says {expected_crc:08x}, computed {actual_crc:08x})"
        )

    stats = CorpusStats.empty(window=window, lowercase=lowercase)
    stats.doc_count = docs
    stats.version = version
    current: NGramTable | None = None
    seen_orders: list[int] = []
    for lineno, raw in enumerate(body.decode("utf-8").splitlines()[1:], start=2):
        if raw.startswith("#ORDER\t"):
            fields = raw.split("\t")
            try:
                order = int(fields[1])
                total = int(fields[2].removeprefix("total="))
            except (IndexError, ValueError) as exc:
                raise StatsFormatError(f"{path}:{lineno}: malformed #ORDER header") from exc
            if order < 1 or order > window:
                raise StatsFormatError(f"{path}:{lineno}: order {order} outside 1..{window}")
            current = stats.tables[order]
            current.total = total
            seen_orders.append(order)
            continue
        if current is None:
            raise StatsFormatError(f"{path}:{lineno}: gram line before any #ORDER section")
        gram, sep, count = raw.partition("\t")
        if not sep:
            raise StatsFormatError(f"{path}:{lineno}: expected gram<TAB>count")
        if gram.count(SEP) != current.order - 1:
            raise StatsFormatError(
                f"{path}:{lineno}: gram has {gram.count(SEP) + 1} words in an order-{current.order} section"
            )
        try:
            current.counts[gram] = int(count)
        except ValueError as exc:
            raise StatsFormatError(f"{path}:{lineno}: bad count {count!r}") from exc
    if seen_orders != list(range(1, window + 1)):
        raise StatsFormatError(
            f"{path}: expected one section per order 1..{window}, found {seen_orders}"
        )
    return stats
