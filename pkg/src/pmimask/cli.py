"""pmimask command-line tool.

Subcommands cover the full pipeline: build n-gram stats over a corpus,
score word importance, generate masks (uniform / importance-aware /
asymmetric pairs), run the corpus analyses, benchmark masking latency,
and serve everything over HTTP. `score`, `mask` and `mask-pair` can also
act as thin clients of a running service via --server.

Exit codes: 0 success, 2 usage error, 3 data/format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import __version__
from .analysis import masked_term_frequency, sampling_distribution, stopword_masked_fraction
from .bench import bench_masking
from .corpus import CORPUS_FORMATS, read_corpus, tokenize_document
from .errors import DataFormatError, PmimaskError, UsageError
from .importance import score_sentence
from .masking import MaskingConfig, derive_rng, mask_pair, mask_sentence
from .ngrams import build_stats, load_stats, save_stats
from .records import mask_line, pair_line, score_line
from .stopwords import load_stopwords


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="corpus file")
    parser.add_argument("--format", choices=CORPUS_FORMATS, default="jsonl", help="corpus format")
    parser.add_argument(
        "--skip-bad", action="store_true", help="skip malformed records instead of aborting"
    )


def _open_output(path: str):
    if path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


def _post(server: str, endpoint: str, payload: dict) -> dict:
    import requests

    try:
        response = requests.post(server.rstrip("/") + endpoint, json=payload, timeout=60)
    except requests.RequestException as exc:
        raise UsageError(f"cannot reach server {server}: {exc}") from exc
    if response.status_code != 200:
        raise DataFormatError(f"server error {response.status_code}: {response.text}")
    return response.json()


def _iter_docs(args):
    reader = read_corpus(args.input, format=args.format, on_error="skip" if args.skip_bad else "raise")
    yield from reader
    if reader.skipped:
        print(f"skipped {reader.skipped} malformed record(s)", file=sys.stderr)


def cmd_build_stats(args) -> int:
    docs = _iter_docs(args)
    stats = build_stats(
        docs,
        window=args.window,
        lowercase=not args.no_lowercase,
        min_count=args.min_count,
        shards=args.shards,
    )
    save_stats(stats, args.output)
    print(
        f"wrote {args.output}: docs={stats.doc_count} words={stats.word_count()} "
        f"vocab={len(stats.tables[1].counts)} window={stats.window}",
        file=sys.stderr,
    )
    return 0


def cmd_score(args) -> int:
    if args.server:
        with _open_output(args.output) as out:
            for doc in _iter_docs(args):
                rec = _post(args.server, "/score", {"id": doc.id, "text": doc.text})
                out.write(score_line(rec["id"], rec["words"], rec["ami"]) + "\n")
        return 0
    stats = load_stats(args.stats)
    with _open_output(args.output) as out:
        for doc in _iter_docs(args):
            sentence = tokenize_document(doc, lowercase=stats.lowercase)
            profile = score_sentence(stats, sentence)
            out.write(score_line(doc.id, sentence.words, profile.scores) + "\n")
    return 0


def cmd_mask(args) -> int:
    if args.server:
        with _open_output(args.output) as out:
            for doc in _iter_docs(args):
                rec = _post(
                    args.server,
                    "/mask",
                    {
                        "id": doc.id,
                        "text": doc.text,
                        "strategy": args.strategy,
                        "ratio": args.ratio,
                        "sigma": args.sigma,
                        "seed": args.seed,
                    },
                )
                out.write(_mask_line_from_record(rec) + "\n")
        return 0
    stats = load_stats(args.stats)
    vocabulary = stats.vocabulary()
    config = MaskingConfig(ratio=args.ratio, sigma=args.sigma, strategy=args.strategy, seed=args.seed)
    with _open_output(args.output) as out:
        for doc in _iter_docs(args):
            sentence = tokenize_document(doc, lowercase=stats.lowercase)
            profile = score_sentence(stats, sentence)
            rng = derive_rng(args.seed, doc.id)
            plan = mask_sentence(sentence.words, profile.scores, vocabulary, config, rng)
            out.write(mask_line(doc.id, sentence.words, plan, profile.scores) + "\n")
    return 0


def _mask_line_from_record(rec: dict) -> str:
    return (
        "{"
        + f'"id": {json.dumps(rec["id"], ensure_ascii=False)}, '
        + f'"words": {json.dumps(rec["words"], ensure_ascii=False)}, '
        + f'"mask": {json.dumps(rec["mask"])}, '
        + f'"actions": {json.dumps(rec["actions"], ensure_ascii=False)}, '
        + '"ami": ['
        + ", ".join(f"{x:.6f}" for x in rec["ami"])
        + "]}"
    )


def cmd_mask_pair(args) -> int:
    if args.server:
        with _open_output(args.output) as out:
            for doc in _iter_docs(args):
                rec = _post(
                    args.server,
                    "/mask-pair",
                    {
                        "id": doc.id,
                        "text": doc.text,
                        "encoder_ratio": args.encoder_ratio,
                        "decoder_ratio": args.decoder_ratio,
                        "sigma": args.sigma,
                        "seed": args.seed,
                    },
                )
                out.write(_pair_line_from_record(rec) + "\n")
        return 0
    stats = load_stats(args.stats)
    vocabulary = stats.vocabulary()
    with _open_output(args.output) as out:
        for doc in _iter_docs(args):
            sentence = tokenize_document(doc, lowercase=stats.lowercase)
            profile = score_sentence(stats, sentence)
            rng = derive_rng(args.seed, doc.id)
            pair = mask_pair(
                sentence.words,
                profile.scores,
                vocabulary,
                rng,
                encoder_ratio=args.encoder_ratio,
                decoder_ratio=args.decoder_ratio,
                sigma=args.sigma,
            )
            out.write(pair_line(doc.id, sentence.words, pair, profile.scores) + "\n")
    return 0


def _pair_line_from_record(rec: dict) -> str:
    return (
        "{"
        + f'"id": {json.dumps(rec["id"], ensure_ascii=False)}, '
        + f'"words": {json.dumps(rec["words"], ensure_ascii=False)}, '
        + f'"encoder_mask": {json.dumps(rec["encoder_mask"])}, '
        + f'"decoder_mask": {json.dumps(rec["decoder_mask"])}, '
        + f'"encoder_actions": {json.dumps(rec["encoder_actions"], ensure_ascii=False)}, '
        + f'"decoder_actions": {json.dumps(rec["decoder_actions"], ensure_ascii=False)}, '
        + '"ami": ['
        + ", ".join(f"{x:.6f}" for x in rec["ami"])
        + "]}"
    )


def _load_analysis_inputs(args):
    stats = load_stats(args.stats)
    sentences = [
        tokenize_document(doc, lowercase=stats.lowercase)
        for doc in _iter_docs(args)
    ]
    return stats, sentences


def cmd_top_masked(args) -> int:
    stats, sentences = _load_analysis_inputs(args)
    histogram = masked_term_frequency(
        sentences, stats, args.strategy, args.ratio, args.trials, seed=args.seed, sigma=args.sigma
    )
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["word", "masked_count"])
        for word, count in histogram.top(args.k):
            writer.writerow([word, count])
    print(f"total masked samples: {histogram.total_masked}", file=sys.stderr)
    return 0


def cmd_stopword_fraction(args) -> int:
    stats, sentences = _load_analysis_inputs(args)
    stopword_set = load_stopwords(args.stopwords)
    fraction = stopword_masked_fraction(
        sentences,
        stats,
        args.strategy,
        args.ratio,
        stopword_set,
        args.trials,
        seed=args.seed,
        sigma=args.sigma,
    )
    print(
        json.dumps(
            {
                "strategy": args.strategy,
                "ratio": args.ratio,
                "trials": args.trials,
                "stopword_fraction": round(fraction, 6),
            }
        )
    )
    return 0


def cmd_distribution(args) -> int:
    stats, sentences = _load_analysis_inputs(args)
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["id", "position", "word", "ami", "frequency"])
        for sentence in sentences:
            profile = score_sentence(stats, sentence)
            freqs = sampling_distribution(
                sentence.words,
                profile.scores,
                args.strategy,
                args.ratio,
                args.sigma,
                args.trials,
                seed=args.seed,
                doc_id=sentence.doc_id,
            )
            for i, word in enumerate(sentence.words):
                writer.writerow(
                    [sentence.doc_id, i, word, f"{profile.scores[i]:.6f}", f"{freqs[i]:.6f}"]
                )
    return 0


def cmd_bench(args) -> int:
    report = bench_masking(
        args.seq_len, args.batch, trials=args.trials, strategy=args.strategy, seed=args.seed
    )
    print(json.dumps(report.to_dict()))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app_from_path

    app = create_app_from_path(args.stats)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmimask", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pmimask {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-stats", help="count n-grams over a corpus and write a stats file")
    _add_corpus_args(p)
    p.add_argument("--output", required=True, help="stats file to write")
    p.add_argument("--window", type=int, default=4, help="max n-gram order (default 4)")
    p.add_argument("--min-count", type=int, default=1, help="drop grams seen fewer times")
    p.add_argument("--no-lowercase", action="store_true", help="keep original casing")
    p.add_argument("--shards", type=int, default=1, help="count in N parallel shards, then merge")
    p.set_defaults(handler=cmd_build_stats)

    p = sub.add_parser("score", help="write per-word importance scores as JSONL")
    _add_corpus_args(p)
    p.add_argument("--stats", help="stats file (required unless --server)")
    p.add_argument("--output", required=True)
    p.add_argument("--server", help="use a running pmimask service instead of local stats")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("mask", help="generate single-strategy masks as JSONL")
    _add_corpus_args(p)
    p.add_argument("--stats", help="stats file (required unless --server)")
    p.add_argument("--strategy", choices=("uniform", "importance"), default="uniform")
    p.add_argument("--ratio", type=float, default=0.15)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", required=True)
    p.add_argument("--server", help="use a running pmimask service instead of local stats")
    p.set_defaults(handler=cmd_mask)

    p = sub.add_parser("mask-pair", help="generate asymmetric encoder/decoder mask pairs")
    _add_corpus_args(p)
    p.add_argument("--stats", help="stats file (required unless --server)")
    p.add_argument("--encoder-ratio", type=float, default=0.3)
    p.add_argument("--decoder-ratio", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", required=True)
    p.add_argument("--server", help="use a running pmimask service instead of local stats")
    p.set_defaults(handler=cmd_mask_pair)

    analyze = sub.add_parser("analyze", help="corpus-level masking analyses")
    asub = analyze.add_subparsers(dest="analysis", required=True)

    p = asub.add_parser("top-masked", help="histogram of most frequently masked terms (CSV)")
    _add_corpus_args(p)
    p.add_argument("--stats", required=True)
    p.add_argument("--strategy", choices=("uniform", "importance"), default="uniform")
    p.add_argument("--ratio", type=float, default=0.15)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--output", default="-")
    p.set_defaults(handler=cmd_top_masked)

    p = asub.add_parser(
        "stopword-fraction", help="fraction of masked words that are stop-words/punctuation"
    )
    _add_corpus_args(p)
    p.add_argument("--stats", required=True)
    p.add_argument("--strategy", choices=("uniform", "importance"), default="uniform")
    p.add_argument("--ratio", type=float, default=0.15)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--stopwords", help="custom stop-word list (one word per line)")
    p.set_defaults(handler=cmd_stopword_fraction)

    p = asub.add_parser("distribution", help="per-position masking frequency (CSV)")
    _add_corpus_args(p)
    p.add_argument("--stats", required=True)
    p.add_argument("--strategy", choices=("uniform", "importance"), default="importance")
    p.add_argument("--ratio", type=float, default=0.3)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", default="-")
    p.set_defaults(handler=cmd_distribution)

    p = sub.add_parser("bench", help="single-threaded mask-selection latency")
    p.add_argument("--seq-len", type=int, default=150)
    p.add_argument("--batch", type=int, default=128)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--strategy", choices=("uniform", "importance"), default="importance")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--stats", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "stats", None) is None and hasattr(args, "stats") and not getattr(args, "server", None):
        parser.error(f"{args.command}: --stats is required unless --server is given")
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PmimaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
