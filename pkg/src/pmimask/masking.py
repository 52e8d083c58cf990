"""Mask generation and corruption.

Two strategies produce a binary mask with exactly floor(n * ratio) ones:

* uniform   - positions drawn uniformly without replacement.
* importance - each importance score is perturbed with independent
  Gaussian noise (standard deviation sigma), scores are sorted
  descending, and the top-k positions are masked. sigma=0 degenerates to
  a deterministic top-k; ties break toward the lower index.

Masked positions are then corrupted: 80% to a mask symbol, 10% to a
random vocabulary word, 10% kept unchanged (configurable fractions).

All randomness flows through a numpy Generator seeded from a stable
blake2b hash of (global_seed, doc_id, stream), so outputs are identical
no matter how documents are ordered or sharded across workers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, UsageError

STRATEGIES = ("uniform", "importance")

ACTION_NONE = "N"
ACTION_MASK = "M"
ACTION_RANDOM = "R"
ACTION_KEEP = "K"

DEFAULT_FRACTIONS = (0.8, 0.1, 0.1)
DEFAULT_ENCODER_RATIO = 0.3
DEFAULT_DECODER_RATIO = 0.5


@dataclass
class MaskingConfig:
    """Knobs for one masking run."""

    ratio: float = 0.15
    sigma: float = 1.0
    strategy: str = "uniform"
    seed: int = 42
    corruption: tuple[float, float, float] = DEFAULT_FRACTIONS
    window: int = 4

    def __post_init__(self) -> None:
        if not 0.0 <= self.ratio <= 1.0:
            raise UsageError(f"ratio must be in [0, 1], got {self.ratio}")
        if self.sigma < 0.0:
            raise UsageError(f"sigma must be >= 0, got {self.sigma}")
        if self.strategy not in STRATEGIES:
            raise UsageError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if len(self.corruption) != 3 or any(f < 0 for f in self.corruption):
            raise UsageError("corruption fractions must be three non-negative numbers")
        if abs(sum(self.corruption) - 1.0) > 1e-12:
            raise UsageError(f"corruption fractions must sum to 1, got {sum(self.corruption)}")


def derive_seed(global_seed: int, doc_id: str, stream: int = 0) -> int:
    """Stable 64-bit seed for one (document, stream) pair."""
    payload = f"{global_seed}\x1f{stream}\x1f{doc_id}".encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_rng(global_seed: int, doc_id: str, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(global_seed, doc_id, stream)))


def mask_cardinality(n: int, ratio: float) -> int:
    return int(n * ratio)


def uniform_mask(n: int, ratio: float, rng: np.random.Generator) -> np.ndarray:
    """Mask floor(n * ratio) positions chosen uniformly without replacement."""
    if not 0.0 <= ratio <= 1.0:
        raise UsageError(f"ratio must be in [0, 1], got {ratio}")
    k = mask_cardinality(n, ratio)
    mask = np.zeros(n, dtype=np.uint8)
    if k:
        mask[rng.permutation(n)[:k]] = 1
    return mask


def importance_mask(
    scores: Sequence[float], ratio: float, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """Mask the floor(n * ratio) positions with the highest perturbed scores."""
    if not 0.0 <= ratio <= 1.0:
        raise UsageError(f"ratio must be in [0, 1], got {ratio}")
    if sigma < 0.0:
        raise UsageError(f"sigma must be >= 0, got {sigma}")
    t = np.asarray(scores, dtype=np.float64)
    if np.isnan(t).any():
        raise UsageError("importance scores contain NaN")
    n = t.size
    k = mask_cardinality(n, ratio)
    mask = np.zeros(n, dtype=np.uint8)
    if k:
        perturbed = t + rng.normal(0.0, 1.0, n) * sigma if sigma > 0.0 else t
        # stable argsort on the negated scores: ties go to the lower index
        top = np.argsort(-perturbed, kind="stable")[:k]
        mask[top] = 1
    return mask


@dataclass
class MaskPlan:
    """Binary mask plus the corruption action at each masked position."""

    mask: np.ndarray
    actions: list[str]
    random_replacements: dict[int, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.actions)

    def encoded_actions(self) -> list[str]:
        """Wire encoding: "N" | "M" | "K" | "R:<replacement word>"."""
        return [
            f"{a}:{self.random_replacements[i]}" if a == ACTION_RANDOM else a
            for i, a in enumerate(self.actions)
        ]

    def apply(self, words: Sequence[str], mask_symbol: str = "[MASK]") -> list[str]:
        """Render the corrupted word sequence."""
        out = list(words)
        for i, action in enumerate(self.actions):
            if action == ACTION_MASK:
                out[i] = mask_symbol
            elif action == ACTION_RANDOM:
                out[i] = self.random_replacements[i]
        return out


@dataclass
class MaskedPair:
    """Independently drawn encoder-side and decoder-side plans."""

    encoder: MaskPlan
    decoder: MaskPlan


def corrupt(
    words: Sequence[str],
    mask: np.ndarray,
    vocabulary: Sequence[str],
    rng: np.random.Generator,
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
) -> MaskPlan:
    """Assign a corruption action to every masked position.

    Each masked position independently becomes MASK / RANDOM / KEEP with
    the given fractions; RANDOM draws its replacement uniformly from the
    vocabulary.
    """
    if len(mask) != len(words):
        raise UsageError(f"mask length {len(mask)} != sentence length {len(words)}")
    mask_frac, random_frac, _ = fractions
    positions = np.flatnonzero(mask)
    actions = [ACTION_NONE] * len(words)
    draws = rng.random(positions.size)
    random_positions = [
        int(pos)
        for pos, u in zip(positions, draws)
        if mask_frac <= u < mask_frac + random_frac
    ]
    if random_positions and len(vocabulary) == 0:
        raise ConfigurationError("random replacement drawn but the vocabulary is empty")
    replacement_idx = rng.integers(0, len(vocabulary), size=len(random_positions)) if random_positions else []
    replacements = {
        pos: vocabulary[int(j)] for pos, j in zip(random_positions, replacement_idx)
    }
    for pos, u in zip(positions, draws):
        if u < mask_frac:
            actions[int(pos)] = ACTION_MASK
        elif u < mask_frac + random_frac:
            actions[int(pos)] = ACTION_RANDOM
        else:
            actions[int(pos)] = ACTION_KEEP
    return MaskPlan(mask=mask, actions=actions, random_replacements=replacements)


def make_mask(
    words: Sequence[str],
    scores: Sequence[float] | None,
    config: MaskingConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Dispatch on config.strategy."""
    if config.strategy == "uniform":
        return uniform_mask(len(words), config.ratio, rng)
    if scores is None:
        raise UsageError("importance strategy needs a score vector")
    if len(scores) != len(words):
        raise UsageError(f"profile length {len(scores)} != sentence length {len(words)}")
    return importance_mask(scores, config.ratio, config.sigma, rng)


def mask_sentence(
    words: Sequence[str],
    scores: Sequence[float] | None,
    vocabulary: Sequence[str],
    config: MaskingConfig,
    rng: np.random.Generator,
) -> MaskPlan:
    """Select a mask with the configured strategy, then corrupt it."""
    mask = make_mask(words, scores, config, rng)
    return corrupt(words, mask, vocabulary, rng, config.corruption)


def mask_pair(
    words: Sequence[str],
    scores: Sequence[float],
    vocabulary: Sequence[str],
    rng: np.random.Generator,
    encoder_ratio: float = DEFAULT_ENCODER_RATIO,
    decoder_ratio: float = DEFAULT_DECODER_RATIO,
    sigma: float = 1.0,
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
) -> MaskedPair:
    """Asymmetric pair: uniform mask on the encoder side, importance-aware
    mask on the decoder side, independent draws, both corrupted the same way."""
    if len(scores) != len(words):
        raise UsageError(f"profile length {len(scores)} != sentence length {len(words)}")
    encoder_mask = uniform_mask(len(words), encoder_ratio, rng)
    encoder = corrupt(words, encoder_mask, vocabulary, rng, fractions)
    decoder_mask = importance_mask(scores, decoder_ratio, sigma, rng)
    decoder = corrupt(words, decoder_mask, vocabulary, rng, fractions)
    return MaskedPair(encoder=encoder, decoder=decoder)
