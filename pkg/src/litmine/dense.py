"""Dense retrieval: abstract embeddings behind a pluggable provider, exact
cosine-similarity search over a flat vector store.

Two providers ship with the package: a deterministic hashed bag-of-tokens
projection (default; zero external services) and a remote HTTP client for
plugging in a real encoder. The store keeps float32 vectors on disk and
scores in float64.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Protocol

import numpy as np

from .corpus import Document
from .errors import CorruptIndexError, InvalidInputError, ProviderError
from .remote import post_json
from .text import tokenize

DEFAULT_DIMENSION = 768


class EmbeddingProvider(Protocol):
    """Maps text to a fixed-dimension vector, deterministically."""

    provider_id: str
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashedEmbeddingProvider:
    """Hashed bag-of-tokens projection, L2-normalized.

    Each token is hashed to one of ``dimension`` buckets; bucket counts are
    accumulated and the vector is L2-normalized. Empty text maps to the zero
    vector. Deterministic across processes (no randomized hashing).
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension <= 0:
            raise InvalidInputError("embedding dimension must be positive")
        self.dimension = dimension
        self.provider_id = f"hashed-bow-{dimension}"

    def bucket(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in tokenize(text):
            vec[self.bucket(token)] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec


class RemoteEmbeddingProvider:
    """Client for an external embedding service (POST /embed {"text"} -> {"vector"})."""

    def __init__(self, endpoint: str, dimension: int = DEFAULT_DIMENSION, timeout: float = 10.0):
        self.endpoint = endpoint.rstrip("/")
        self.dimension = dimension
        self.timeout = timeout
        self.provider_id = f"remote-{dimension}"

    def embed(self, text: str) -> np.ndarray:
        payload = post_json(f"{self.endpoint}/embed", {"text": text}, timeout=self.timeout)
        vector = payload.get("vector")
        if not isinstance(vector, list) or len(vector) != self.dimension:
            raise ProviderError(
                f"embedding service returned {0 if not isinstance(vector, list) else len(vector)} "
                f"values, expected {self.dimension}"
            )
        arr = np.asarray(vector, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ProviderError("embedding service returned non-finite values")
        return arr


class DenseStore:
    """doc_count x dimension matrix of abstract embeddings with doc_id lookup."""

    def __init__(self, doc_ids: list[str], matrix: np.ndarray, provider_id: str):
        if matrix.ndim != 2 or matrix.shape[0] != len(doc_ids):
            raise InvalidInputError("vector matrix shape does not match doc ids")
        self.doc_ids = list(doc_ids)
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        self.provider_id = provider_id
        self.dimension = int(matrix.shape[1])
        self._norms = np.linalg.norm(self.matrix.astype(np.float64), axis=1)

    def __len__(self) -> int:
        return len(self.doc_ids)

    def save(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        raw = self.matrix.astype("<f4").tobytes()
        (out / "vectors.f32").write_bytes(raw)
        manifest = {
            "dimension": self.dimension,
            "count": len(self.doc_ids),
            "provider_id": self.provider_id,
            "checksum": hashlib.sha256(raw).hexdigest(),
            "doc_ids": self.doc_ids,
        }
        (out / "manifest.json").write_text(
            json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2), encoding="utf-8"
        )

    @classmethod
    def load(cls, in_dir: str | Path) -> "DenseStore":
        src = Path(in_dir)
        try:
            manifest = json.loads((src / "manifest.json").read_text(encoding="utf-8"))
            raw = (src / "vectors.f32").read_bytes()
        except (OSError, json.JSONDecodeError) as exc:
            raise CorruptIndexError(f"cannot read vector store: {exc}") from exc
        if hashlib.sha256(raw).hexdigest() != manifest.get("checksum"):
            raise CorruptIndexError("vector file does not match manifest checksum")
        count, dim = manifest["count"], manifest["dimension"]
        if len(raw) != count * dim * 4:
            raise CorruptIndexError("vector file length does not match manifest")
        matrix = np.frombuffer(raw, dtype="<f4").reshape(count, dim)
        return cls(manifest["doc_ids"], matrix, manifest["provider_id"])


def build_store(docs: list[Document], provider: EmbeddingProvider) -> DenseStore:
    """Embed every document abstract; one row per document, in input order."""
    if not docs:
        raise InvalidInputError("cannot build a vector store over zero documents")
    if provider.dimension <= 0:
        raise InvalidInputError("provider dimension must be positive")
    matrix = np.zeros((len(docs), provider.dimension), dtype=np.float64)
    for i, doc in enumerate(docs):
        try:
            vec = provider.embed(doc.abstract_text)
        except Exception as exc:
            raise ProviderError(f"embedding failed for doc {doc.doc_id}: {exc}") from exc
        if vec.shape != (provider.dimension,):
            raise ProviderError(f"provider returned wrong dimension for doc {doc.doc_id}")
        matrix[i] = vec
    return DenseStore([d.doc_id for d in docs], matrix, provider.provider_id)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u, v) / (|u| * |v|); defined as 0 when either norm is 0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise InvalidInputError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def dense_scores(store: DenseStore, query_vec: np.ndarray) -> list[tuple[str, float]]:
    """Cosine of the query against every stored vector.

    Sorted by score descending, ties broken by doc_id ascending.
    """
    q = np.asarray(query_vec, dtype=np.float64)
    if q.shape != (store.dimension,):
        raise InvalidInputError(f"query dimension {q.shape} != store dimension {store.dimension}")
    qnorm = np.linalg.norm(q)
    if qnorm == 0.0:
        sims = np.zeros(len(store.doc_ids))
    else:
        dots = store.matrix.astype(np.float64) @ q
        denom = store._norms * qnorm
        sims = np.divide(dots, denom, out=np.zeros_like(dots), where=denom > 0.0)
    scored = [(doc_id, float(s)) for doc_id, s in zip(store.doc_ids, sims)]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored
