"""HTTP service wrapping the scoring and masking core.

The stats table is loaded once at startup and shared read-only by all
requests, so many pipeline workers can query one process. Requests carry
either pre-tokenized words or raw text (tokenized server-side with the
flags the stats were built with). Responses mirror the CLI JSONL schemas
field for field; masks produced here for a given (seed, doc id) are
identical to the CLI's.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, field_validator

from .corpus import tokenize
from .errors import UsageError
from .importance import score_sentence
from .masking import (
    DEFAULT_DECODER_RATIO,
    DEFAULT_ENCODER_RATIO,
    MaskingConfig,
    derive_rng,
    mask_pair,
    mask_sentence,
)
from .ngrams import CorpusStats, load_stats


def _check_words(words: list[str] | None) -> list[str] | None:
    if words is None:
        return None
    for w in words:
        if not w or any(ch.isspace() for ch in w):
            raise ValueError(f"words must be non-empty and whitespace-free, got {w!r}")
    return words


class SentenceRequest(BaseModel):
    """One document: give either `words` or raw `text`, not both."""

    id: str = "0"
    words: list[str] | None = None
    text: str | None = None

    _validate_words = field_validator("words")(classmethod(lambda cls, v: _check_words(v)))

    def resolve_words(self, lowercase: bool) -> list[str]:
        if (self.words is None) == (self.text is None):
            raise UsageError("provide exactly one of 'words' or 'text'")
        if self.words is not None:
            return self.words
        return tokenize(self.text, lowercase=lowercase)


class ScoreRequest(SentenceRequest):
    pass


class MaskRequest(SentenceRequest):
    strategy: str = "uniform"
    ratio: float = 0.15
    sigma: float = 1.0
    seed: int = 42


class MaskPairRequest(SentenceRequest):
    encoder_ratio: float = DEFAULT_ENCODER_RATIO
    decoder_ratio: float = DEFAULT_DECODER_RATIO
    sigma: float = 1.0
    seed: int = 42


class TokenizeRequest(BaseModel):
    text: str


class TokenizeResponse(BaseModel):
    words: list[str]


class ScoreResponse(BaseModel):
    id: str
    words: list[str]
    ami: list[float]


class MaskResponse(BaseModel):
    id: str
    words: list[str]
    mask: list[int]
    actions: list[str]
    ami: list[float]


class MaskPairResponse(BaseModel):
    id: str
    words: list[str]
    encoder_mask: list[int]
    decoder_mask: list[int]
    encoder_actions: list[str]
    decoder_actions: list[str]
    ami: list[float]


class HealthResponse(BaseModel):
    status: str
    window: int
    docs: int
    words: int
    vocabulary: int
    lowercase: bool


def _round6(scores: list[float]) -> list[float]:
    return [round(x, 6) for x in scores]


def create_app(stats: CorpusStats) -> FastAPI:
    app = FastAPI(title="pmimask", description="PMI-based importance scoring and masking service")
    vocabulary = stats.vocabulary()

    @app.exception_handler(UsageError)
    async def usage_error_handler(request: Request, exc: UsageError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(
            status="ok",
            window=stats.window,
            docs=stats.doc_count,
            words=stats.word_count(),
            vocabulary=len(vocabulary),
            lowercase=stats.lowercase,
        )

    @app.post("/tokenize", response_model=TokenizeResponse)
    def tokenize_text(req: TokenizeRequest):
        return TokenizeResponse(words=tokenize(req.text, lowercase=stats.lowercase))

    @app.post("/score", response_model=ScoreResponse)
    def score(req: ScoreRequest):
        words = req.resolve_words(stats.lowercase)
        profile = score_sentence(stats, words)
        return ScoreResponse(id=req.id, words=words, ami=_round6(profile.scores))

    @app.post("/mask", response_model=MaskResponse)
    def mask(req: MaskRequest):
        words = req.resolve_words(stats.lowercase)
        config = MaskingConfig(ratio=req.ratio, sigma=req.sigma, strategy=req.strategy, seed=req.seed)
        profile = score_sentence(stats, words)
        rng = derive_rng(req.seed, req.id)
        plan = mask_sentence(words, profile.scores, vocabulary, config, rng)
        return MaskResponse(
            id=req.id,
            words=words,
            mask=[int(b) for b in plan.mask],
            actions=plan.encoded_actions(),
            ami=_round6(profile.scores),
        )

    @app.post("/mask-pair", response_model=MaskPairResponse)
    def mask_pair_endpoint(req: MaskPairRequest):
        words = req.resolve_words(stats.lowercase)
        profile = score_sentence(stats, words)
        rng = derive_rng(req.seed, req.id)
        pair = mask_pair(
            words,
            profile.scores,
            vocabulary,
            rng,
            encoder_ratio=req.encoder_ratio,
            decoder_ratio=req.decoder_ratio,
            sigma=req.sigma,
        )
        return MaskPairResponse(
            id=req.id,
            words=words,
            encoder_mask=[int(b) for b in pair.encoder.mask],
            decoder_mask=[int(b) for b in pair.decoder.mask],
            encoder_actions=pair.encoder.encoded_actions(),
            decoder_actions=pair.decoder.encoded_actions(),
            ami=_round6(profile.scores),
        )

    return app


def create_app_from_path(stats_path: str) -> FastAPI:
    return create_app(load_stats(stats_path))
