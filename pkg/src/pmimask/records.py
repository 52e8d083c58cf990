"""Deterministic JSONL record formatting shared by the CLI and tests.

AMI values are emitted with exactly 6 decimal places; everything else
goes through json.dumps with ensure_ascii=False, so a given record has
one byte representation on every platform.
"""

from __future__ import annotations

import json
from typing import Sequence

from .masking import MaskedPair, MaskPlan


def _dump(value) -> str:
    return json.dumps(value, ensure_ascii=False)


def format_scores(scores: Sequence[float]) -> str:
    return "[" + ", ".join(f"{x:.6f}" for x in scores) + "]"


def score_line(doc_id: str, words: Sequence[str], scores: Sequence[float]) -> str:
    return (
        "{"
        + f'"id": {_dump(doc_id)}, "words": {_dump(list(words))}, "ami": {format_scores(scores)}'
        + "}"
    )


def mask_line(doc_id: str, words: Sequence[str], plan: MaskPlan, scores: Sequence[float]) -> str:
    return (
        "{"
        + f'"id": {_dump(doc_id)}, "words": {_dump(list(words))}, '
        + f'"mask": {_dump([int(b) for b in plan.mask])}, '
        + f'"actions": {_dump(plan.encoded_actions())}, '
        + f'"ami": {format_scores(scores)}'
        + "}"
    )


def pair_line(doc_id: str, words: Sequence[str], pair: MaskedPair, scores: Sequence[float]) -> str:
    return (
        "{"
        + f'"id": {_dump(doc_id)}, "words": {_dump(list(words))}, '
        + f'"encoder_mask": {_dump([int(b) for b in pair.encoder.mask])}, '
        + f'"decoder_mask": {_dump([int(b) for b in pair.decoder.mask])}, '
        + f'"encoder_actions": {_dump(pair.encoder.encoded_actions())}, '
        + f'"decoder_actions": {_dump(pair.decoder.encoded_actions())}, '
        + f'"ami": {format_scores(scores)}'
        + "}"
    )
