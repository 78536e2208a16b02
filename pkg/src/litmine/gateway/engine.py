"""Artifact building/loading and the assembled query engine.

The engine owns the immutable artifacts (corpus store, inverted index, vector
store) plus the four pluggable providers, and exposes the search / answer /
chat entry points that the CLI and HTTP layers are thin wrappers over.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from pathlib import Path

from ..answers import (
    ANSWER_LIMIT,
    OverlapSpanExtractor,
    RemoteSpanExtractor,
    SpanExtractor,
    SystemResponse,
    answer_pipeline,
)
from ..corpus import CorpusStore, IngestReport, ingest_corpus, iter_corpus_file
from ..dense import (
    DenseStore,
    EmbeddingProvider,
    HashedEmbeddingProvider,
    RemoteEmbeddingProvider,
    build_store,
)
from ..dialogue import (
    CannedGenerator,
    ChatDeps,
    Generator,
    RemoteGenerator,
    Session,
    SessionStore,
    handle_turn,
)
from ..errors import InvalidInputError
from ..fusion import FusionConfig, RetrievalResult, retrieve
from ..nlu import (
    CovidClassifier,
    DiseaseDictionary,
    KeywordCovidClassifier,
    RemoteCovidClassifier,
)
from ..sparse import InvertedIndex, build_index, load_index, save_index
from .config import AppConfig

log = logging.getLogger("litmine")

INDEX_FILE = "index.bin"
VECTORS_DIR = "vectors"
REPORT_FILE = "ingest_report.json"


def run_ingest(corpus_path: str | Path, out_dir: str | Path, window: int, overlap: int) -> tuple[CorpusStore, IngestReport]:
    store, report = ingest_corpus(iter_corpus_file(corpus_path), window=window, overlap=overlap)
    out = Path(out_dir)
    store.save(out)
    (out / REPORT_FILE).write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    return store, report


def run_index(artifacts_dir: str | Path, k1: float, b: float) -> InvertedIndex:
    corpus = CorpusStore.load(artifacts_dir)
    index = build_index(corpus.documents(), k1=k1, b=b)
    (Path(artifacts_dir) / INDEX_FILE).write_bytes(save_index(index))
    return index


def run_embed(artifacts_dir: str | Path, provider: EmbeddingProvider) -> DenseStore:
    corpus = CorpusStore.load(artifacts_dir)
    store = build_store(corpus.documents(), provider)
    store.save(Path(artifacts_dir) / VECTORS_DIR)
    return store


def build_embedder(cfg: AppConfig, dimension: int | None = None) -> EmbeddingProvider:
    # A loaded vector store fixes the dimension; the config only decides it
    # at build time.
    dimension = dimension or cfg.embedding_dimension
    if cfg.embedder_endpoint:
        return RemoteEmbeddingProvider(cfg.embedder_endpoint, dimension)
    return HashedEmbeddingProvider(dimension)


def build_extractor(cfg: AppConfig) -> SpanExtractor:
    if cfg.extractor_endpoint:
        return RemoteSpanExtractor(cfg.extractor_endpoint)
    return OverlapSpanExtractor()


def build_classifier(cfg: AppConfig, dictionary: DiseaseDictionary) -> CovidClassifier:
    if cfg.classifier_endpoint:
        return RemoteCovidClassifier(cfg.classifier_endpoint)
    return KeywordCovidClassifier(dictionary)


def build_generator(cfg: AppConfig) -> Generator:
    if cfg.generator_endpoint:
        return RemoteGenerator(cfg.generator_endpoint)
    return CannedGenerator()


class Engine:
    """Loaded artifacts + providers; read-only after construction."""

    def __init__(
        self,
        config: AppConfig,
        corpus: CorpusStore,
        index: InvertedIndex,
        store: DenseStore | None,
    ):
        self.config = config
        self.corpus = corpus
        self.index = index
        self.store = store
        self.dictionary = (
            DiseaseDictionary.from_file(config.dictionary_path)
            if config.dictionary_path
            else DiseaseDictionary.default()
        )
        self.embedder = build_embedder(config, store.dimension if store is not None else None)
        self.extractor = build_extractor(config)
        self.classifier = build_classifier(config, self.dictionary)
        self.generator = build_generator(config)
        self.sessions = SessionStore(ttl=config.session_ttl)

    @classmethod
    def load(cls, config: AppConfig) -> "Engine":
        artifacts = Path(config.artifacts_dir)
        if not (artifacts / "documents.jsonl").exists():
            raise InvalidInputError(f"no ingested corpus under {artifacts}")
        corpus = CorpusStore.load(artifacts)
        index_path = artifacts / INDEX_FILE
        if not index_path.exists():
            raise InvalidInputError(f"no index at {index_path} (run `litmine index` first)")
        index = load_index(index_path.read_bytes())
        vectors = artifacts / VECTORS_DIR
        store = DenseStore.load(vectors) if (vectors / "manifest.json").exists() else None
        if store is None:
            log.warning("no vector store under %s; dense arm disabled", vectors)
        return cls(config, corpus, index, store)

    def fusion_config(self, **overrides) -> FusionConfig:
        base = {
            "bm25_threshold": self.config.bm25_threshold,
            "cosine_threshold": self.config.cosine_threshold,
            "top_k": self.config.top_k,
            "strategy": self.config.strategy,
        }
        base.update({k: v for k, v in overrides.items() if v is not None})
        return FusionConfig(**base)

    def search(self, query: str, **overrides) -> RetrievalResult:
        started = time.perf_counter()
        result = retrieve(query, self.index, self.store, self.embedder, self.fusion_config(**overrides))
        log.info("search %r: %d candidates in %.1f ms", query, len(result.candidates),
                 1000 * (time.perf_counter() - started))
        return result

    def answer(self, question: str, **overrides) -> SystemResponse:
        result = self.search(question, **overrides)
        started = time.perf_counter()
        response = answer_pipeline(
            question,
            result.candidates,
            self.corpus,
            self.extractor,
            alpha=self.config.alpha,
            answer_limit=self.config.answer_cap,
        )
        log.info("extraction %r: kind=%s in %.1f ms", question, response.kind,
                 1000 * (time.perf_counter() - started))
        response.diagnostics["retrieval"] = result.diagnostics
        if result.warnings:
            response.diagnostics.setdefault("warnings", []).extend(result.warnings)
        return response

    def chat_deps(self) -> ChatDeps:
        return ChatDeps(
            index=self.index,
            store=self.store,
            corpus=self.corpus,
            embedder=self.embedder,
            extractor=self.extractor,
            classifier=self.classifier,
            generator=self.generator,
            dictionary=self.dictionary,
            fusion=self.fusion_config(),
            alpha=self.config.alpha,
        )

    def chat(self, session: Session, text: str) -> SystemResponse:
        response, _ = handle_turn(session, text, self.chat_deps())
        return response

    def artifact_checksums(self) -> dict[str, str]:
        artifacts = Path(self.config.artifacts_dir)
        sums = {}
        for name in ("documents.jsonl", "chunks.jsonl", INDEX_FILE,
                     f"{VECTORS_DIR}/manifest.json", f"{VECTORS_DIR}/vectors.f32"):
            path = artifacts / name
            if path.exists():
                sums[name] = hashlib.sha256(path.read_bytes()).hexdigest()
        return sums
