"""Hybrid score fusion: per-arm thresholds, union of survivors, min-max
normalization, weighted aggregation, top-k cut.

Both retrieval arms produce (doc_id, raw score) lists; fusion is a pure
function over those lists, so the eval harness can re-threshold cached raw
scores cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict, replace
from typing import Literal, Sequence

import numpy as np

from .dense import DenseStore, EmbeddingProvider, dense_scores
from .errors import InvalidInputError, ProviderError
from .sparse import InvertedIndex, bm25_scores, tokenize

DEFAULT_BM25_THRESHOLD = 2.77
DEFAULT_COSINE_THRESHOLD = 0.89
DEFAULT_TOP_K = 20

Strategy = Literal["sparse_only", "dense_only", "union"]
STRATEGIES: tuple[Strategy, ...] = ("sparse_only", "dense_only", "union")


@dataclass(frozen=True)
class FusionConfig:
    bm25_threshold: float = DEFAULT_BM25_THRESHOLD
    cosine_threshold: float = DEFAULT_COSINE_THRESHOLD
    top_k: int = DEFAULT_TOP_K
    strategy: Strategy = "union"
    w_bm25: float = 1.0
    w_cos: float = 1.0

    def __post_init__(self):
        if self.top_k < 1:
            raise InvalidInputError("top_k must be >= 1")
        if not (np.isfinite(self.bm25_threshold) and np.isfinite(self.cosine_threshold)):
            raise InvalidInputError("thresholds must be finite")
        if self.strategy not in STRATEGIES:
            raise InvalidInputError(f"unknown strategy: {self.strategy!r}")


@dataclass(frozen=True)
class FusedCandidate:
    doc_id: str
    bm25_raw: float
    cosine_raw: float
    bm25_norm: float
    cosine_norm: float
    aggregated: float
    passed_bm25: bool
    passed_cosine: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RetrievalResult:
    """Fused candidates plus warnings and a per-stage trace for diagnostics."""

    candidates: list[FusedCandidate]
    warnings: list[str] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def threshold_filter(scored: Sequence[tuple[str, float]], threshold: float) -> list[tuple[str, float]]:
    """Keep entries with score >= threshold (inclusive), order preserved."""
    return [(doc_id, score) for doc_id, score in scored if score >= threshold]


def minmax_normalize(scores: Sequence[float]) -> list[float]:
    """(s - min) / (max - min) elementwise.

    Degenerate pools (single element, or all values equal) normalize to 1.0;
    an empty input yields an empty output.
    """
    if not scores:
        return []
    lo, hi = min(scores), max(scores)
    if hi == lo:
        return [1.0] * len(scores)
    span = hi - lo
    return [(s - lo) / span for s in scores]


def fuse(
    bm25_results: Sequence[tuple[str, float]],
    dense_results: Sequence[tuple[str, float]],
    cfg: FusionConfig,
) -> list[FusedCandidate]:
    """Threshold each arm, take the strategy's candidate set, normalize per
    arm over that set, aggregate, re-rank, and cut to top_k.

    A candidate missing from one arm's result list gets raw 0 for that arm.
    Under single-arm strategies only the active arm contributes to the
    aggregate (the other arm's normalized score is 0).
    """
    bm25_raw = dict(bm25_results)
    cosine_raw = dict(dense_results)
    bm25_survivors = [doc_id for doc_id, _ in threshold_filter(bm25_results, cfg.bm25_threshold)]
    cosine_survivors = [doc_id for doc_id, _ in threshold_filter(dense_results, cfg.cosine_threshold)]

    if cfg.strategy == "sparse_only":
        pool = list(bm25_survivors)
    elif cfg.strategy == "dense_only":
        pool = list(cosine_survivors)
    else:
        seen = set()
        pool = []
        for doc_id in list(bm25_survivors) + list(cosine_survivors):
            if doc_id not in seen:
                seen.add(doc_id)
                pool.append(doc_id)
    if not pool:
        return []

    raw_b = [bm25_raw.get(doc_id, 0.0) for doc_id in pool]
    raw_c = [cosine_raw.get(doc_id, 0.0) for doc_id in pool]
    norm_b = minmax_normalize(raw_b) if cfg.strategy != "dense_only" else [0.0] * len(pool)
    norm_c = minmax_normalize(raw_c) if cfg.strategy != "sparse_only" else [0.0] * len(pool)

    candidates = [
        FusedCandidate(
            doc_id=doc_id,
            bm25_raw=rb,
            cosine_raw=rc,
            bm25_norm=nb,
            cosine_norm=nc,
            aggregated=cfg.w_bm25 * nb + cfg.w_cos * nc,
            passed_bm25=rb >= cfg.bm25_threshold,
            passed_cosine=rc >= cfg.cosine_threshold,
        )
        for doc_id, rb, rc, nb, nc in zip(pool, raw_b, raw_c, norm_b, norm_c)
    ]
    candidates.sort(key=lambda c: (-c.aggregated, c.doc_id))
    return candidates[: cfg.top_k]


def retrieve(
    query_text: str,
    index: InvertedIndex,
    store: DenseStore | None,
    provider: EmbeddingProvider | None,
    cfg: FusionConfig,
) -> RetrievalResult:
    """Run both retrieval arms for a query and fuse them.

    If the embedding provider fails (or no store is configured), degrades to
    sparse_only and flags a warning in the result envelope.
    """
    warnings: list[str] = []
    sparse_results = bm25_scores(index, tokenize(query_text))
    dense_results: list[tuple[str, float]] = []
    effective = cfg
    if cfg.strategy != "sparse_only":
        if store is None or provider is None:
            effective = replace(cfg, strategy="sparse_only")
            warnings.append("dense arm unavailable; fell back to sparse_only")
        else:
            try:
                dense_results = dense_scores(store, provider.embed(query_text))
            except ProviderError as exc:
                effective = replace(cfg, strategy="sparse_only")
                warnings.append(f"embedding provider failed ({exc}); fell back to sparse_only")

    candidates = fuse(sparse_results, dense_results, effective)
    pool: set[str] = set()
    if effective.strategy != "dense_only":
        pool |= {d for d, _ in threshold_filter(sparse_results, effective.bm25_threshold)}
    if effective.strategy != "sparse_only":
        pool |= {d for d, _ in threshold_filter(dense_results, effective.cosine_threshold)}
    diagnostics = {
        "strategy": effective.strategy,
        "bm25_top": sparse_results[0][1] if sparse_results else None,
        "cosine_top": dense_results[0][1] if dense_results else None,
        "bm25_scored": len(sparse_results),
        "dense_scored": len(dense_results),
        "pool_size": len(pool),
        "returned": len(candidates),
    }
    return RetrievalResult(candidates=candidates, warnings=warnings, diagnostics=diagnostics)
