"""Inverted index over document abstracts with Okapi BM25 scoring.

The index is immutable after build; scoring walks posting lists only for the
query's terms. Serialization is a small versioned binary format,
deterministic byte-for-byte for identical input. Layout (all little-endian):

    magic "LMIX" | version u16 | k1 f64 | b f64 | doc_count u32
    doc table: doc_count x (id_len u16, id utf-8, doc_length u32)
    term_count u32
    per term (sorted lexicographically):
        term_len u16, term utf-8, postings_count u32,
        postings_count x (doc_ordinal gap u32, term_frequency u32)

Posting ordinals are delta-encoded (gap from the previous ordinal). Layout
changes bump the version; a mismatched version or a truncated/overlong
stream raises CorruptIndexError.
"""

from __future__ import annotations

import io
import math
import struct
from typing import NamedTuple

from .corpus import Document
from .errors import CorruptIndexError, InvalidInputError
from .text import tokenize

__all__ = ["tokenize", "Posting", "InvertedIndex", "build_index", "bm25_scores",
           "save_index", "load_index", "DEFAULT_K1", "DEFAULT_B"]

DEFAULT_K1 = 1.5
DEFAULT_B = 0.75

_MAGIC = b"LMIX"
_VERSION = 1


class Posting(NamedTuple):
    doc_ordinal: int
    term_frequency: int


class InvertedIndex:
    def __init__(
        self,
        term_postings: dict[str, list[Posting]],
        doc_lengths: list[int],
        doc_ids: list[str],
        k1: float = DEFAULT_K1,
        b: float = DEFAULT_B,
    ):
        self.term_postings = term_postings
        self.doc_lengths = doc_lengths
        self.doc_ids = doc_ids
        self.doc_count = len(doc_ids)
        self.avg_doc_length = sum(doc_lengths) / len(doc_lengths)
        self.k1 = k1
        self.b = b

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return (
            self.term_postings == other.term_postings
            and self.doc_lengths == other.doc_lengths
            and self.doc_ids == other.doc_ids
            and self.k1 == other.k1
            and self.b == other.b
        )

    def idf(self, term: str) -> float:
        """ln(1 + (N - df + 0.5) / (df + 0.5)); strictly positive for df <= N."""
        df = len(self.term_postings.get(term, ()))
        if df == 0:
            return 0.0
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))


def build_index(docs: list[Document], k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> InvertedIndex:
    """Build the inverted index over abstract tokens (bodies are not indexed)."""
    if not docs:
        raise InvalidInputError("cannot build an index over zero documents")
    seen_ids = set()
    for doc in docs:
        if doc.doc_id in seen_ids:
            raise InvalidInputError(f"duplicate doc_id: {doc.doc_id}")
        seen_ids.add(doc.doc_id)

    term_postings: dict[str, list[Posting]] = {}
    doc_lengths: list[int] = []
    doc_ids: list[str] = []
    for ordinal, doc in enumerate(docs):
        tokens = list(doc.abstract_tokens)
        doc_lengths.append(len(tokens))
        doc_ids.append(doc.doc_id)
        counts: dict[str, int] = {}
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
        for term, tf in counts.items():
            term_postings.setdefault(term, []).append(Posting(ordinal, tf))
    # Postings are appended in ordinal order, so lists are already sorted.
    return InvertedIndex(term_postings, doc_lengths, doc_ids, k1, b)


def bm25_scores(index: InvertedIndex, query_tokens: list[str]) -> list[tuple[str, float]]:
    """Score every document containing at least one query term.

    Duplicated query tokens contribute once per occurrence. Results are
    sorted by score descending, ties broken by doc_id ascending.
    """
    k1, b, avgdl = index.k1, index.b, index.avg_doc_length
    accum: dict[int, float] = {}
    for term in query_tokens:
        postings = index.term_postings.get(term)
        if not postings:
            continue
        idf = index.idf(term)
        for ordinal, tf in postings:
            norm = k1 * (1.0 - b + b * index.doc_lengths[ordinal] / avgdl)
            accum[ordinal] = accum.get(ordinal, 0.0) + idf * tf * (k1 + 1.0) / (tf + norm)
    scored = [(index.doc_ids[ordinal], score) for ordinal, score in accum.items()]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def save_index(index: InvertedIndex) -> bytes:
    """Serialize to the versioned binary format (terms sorted, postings delta-encoded)."""
    buf = io.BytesIO()
    buf.write(_MAGIC)
    buf.write(struct.pack("<Hdd I", _VERSION, index.k1, index.b, index.doc_count))
    for doc_id, length in zip(index.doc_ids, index.doc_lengths):
        raw = doc_id.encode("utf-8")
        buf.write(struct.pack("<H", len(raw)))
        buf.write(raw)
        buf.write(struct.pack("<I", length))
    terms = sorted(index.term_postings)
    buf.write(struct.pack("<I", len(terms)))
    for term in terms:
        raw = term.encode("utf-8")
        buf.write(struct.pack("<H", len(raw)))
        buf.write(raw)
        postings = index.term_postings[term]
        buf.write(struct.pack("<I", len(postings)))
        prev = 0
        for ordinal, tf in postings:
            buf.write(struct.pack("<II", ordinal - prev, tf))
            prev = ordinal
    return buf.getvalue()


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptIndexError("index stream is truncated")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def done(self) -> bool:
        return self.pos == len(self.data)


def load_index(data: bytes) -> InvertedIndex:
    reader = _Reader(data)
    if reader.take(4) != _MAGIC:
        raise CorruptIndexError("not a litmine index (bad magic bytes)")
    version, k1, b, doc_count = reader.unpack("<Hdd I")
    if version != _VERSION:
        raise CorruptIndexError(f"unsupported index version {version}")
    doc_ids: list[str] = []
    doc_lengths: list[int] = []
    for _ in range(doc_count):
        (id_len,) = reader.unpack("<H")
        doc_ids.append(reader.take(id_len).decode("utf-8"))
        (length,) = reader.unpack("<I")
        doc_lengths.append(length)
    (term_count,) = reader.unpack("<I")
    term_postings: dict[str, list[Posting]] = {}
    for _ in range(term_count):
        (term_len,) = reader.unpack("<H")
        term = reader.take(term_len).decode("utf-8")
        (n_postings,) = reader.unpack("<I")
        postings = []
        prev = 0
        for _ in range(n_postings):
            gap, tf = reader.unpack("<II")
            prev += gap
            if prev >= doc_count:
                raise CorruptIndexError(f"posting ordinal {prev} out of range")
            postings.append(Posting(prev, tf))
        term_postings[term] = postings
    if not reader.done():
        raise CorruptIndexError("trailing bytes after index payload")
    if doc_count == 0:
        raise CorruptIndexError("index contains no documents")
    return InvertedIndex(term_postings, doc_lengths, doc_ids, k1, b)
