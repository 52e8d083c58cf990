"""Single-threaded latency benchmark of the mask-selection operation.

Measures wall-clock time per batch of independent synthetic sentences.
Only mask selection is timed (no importance scoring, no corruption):
that is the part whose cost differs between strategies. Importance
scores are pre-generated outside the timed region.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .masking import importance_mask, uniform_mask

BENCH_RATIO = 0.5
BENCH_SIGMA = 1.0


@dataclass
class LatencyReport:
    seq_len: int
    batch: int
    trials: int
    strategy: str
    mean_ms: float
    p50_ms: float
    p95_ms: float

    def to_dict(self) -> dict:
        return {
            "seq_len": self.seq_len,
            "batch": self.batch,
            "trials": self.trials,
            "strategy": self.strategy,
            "mean_ms": round(self.mean_ms, 4),
            "p50_ms": round(self.p50_ms, 4),
            "p95_ms": round(self.p95_ms, 4),
        }


def bench_masking(
    seq_len: int,
    batch: int,
    trials: int = 100,
    strategy: str = "importance",
    seed: int = 42,
    warmup: int = 5,
) -> LatencyReport:
    """Time `trials` batches of `batch` sentences of `seq_len` words each."""
    if seq_len < 1:
        raise UsageError(f"seq-len must be >= 1, got {seq_len}")
    if batch < 1:
        raise UsageError(f"batch must be >= 1, got {batch}")
    if trials < 30:
        raise UsageError(f"need >= 30 trials for a reportable latency, got {trials}")
    if strategy not in ("uniform", "importance"):
        raise UsageError(f"unknown strategy {strategy!r}")

    rng = np.random.Generator(np.random.PCG64(seed))
    scores = rng.normal(0.0, 2.0, size=(batch, seq_len))

    def run_batch() -> None:
        if strategy == "uniform":
            for _ in range(batch):
                uniform_mask(seq_len, BENCH_RATIO, rng)
        else:
            for row in scores:
                importance_mask(row, BENCH_RATIO, BENCH_SIGMA, rng)

    for _ in range(warmup):
        run_batch()

    times_ms = np.empty(trials)
    for i in range(trials):
        start = time.perf_counter()
        run_batch()
        times_ms[i] = (time.perf_counter() - start) * 1e3

    return LatencyReport(
        seq_len=seq_len,
        batch=batch,
        trials=trials,
        strategy=strategy,
        mean_ms=float(times_ms.mean()),
        p50_ms=float(np.percentile(times_ms, 50)),
        p95_ms=float(np.percentile(times_ms, 95)),
    )
