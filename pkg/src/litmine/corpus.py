"""Corpus ingestion: parsing, cross-source dedup, document filters, body chunking.

The pipeline is parse -> deduplicate -> filter -> chunk. Records are dropped
for auditable reasons and every drop is counted in an :class:`IngestReport`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import InvalidInputError, InvalidParameterError
from .text import tokenize, tokenize_with_spans

DEFAULT_WINDOW = 220
DEFAULT_OVERLAP = 50
MAX_ABSTRACT_TOKENS = 300
MAX_BODY_PARAGRAPHS = 100

PARAGRAPH_SEP = "\n\n"


@dataclass(frozen=True)
class RawRecord:
    """One corpus line as parsed, before dedup and filtering."""

    doc_id: str
    source: str
    title: str
    abstract_text: str
    body_paragraphs: tuple[str, ...]

    def token_count(self) -> int:
        """Total abstract + body tokens; the dedup survivor criterion."""
        total = len(tokenize(self.abstract_text))
        for para in self.body_paragraphs:
            total += len(tokenize(para))
        return total


@dataclass(frozen=True)
class Document:
    """A deduplicated, filtered literature record."""

    doc_id: str
    title: str
    abstract_text: str
    abstract_tokens: tuple[str, ...]
    body_paragraphs: tuple[str, ...]
    source: str

    def body_text(self) -> str:
        return PARAGRAPH_SEP.join(self.body_paragraphs)

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "title": self.title,
            "abstract": self.abstract_text,
            "body": list(self.body_paragraphs),
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Document":
        return cls(
            doc_id=obj["doc_id"],
            title=obj["title"],
            abstract_text=obj["abstract"],
            abstract_tokens=tuple(tokenize(obj["abstract"])),
            body_paragraphs=tuple(obj["body"]),
            source=obj["source"],
        )


@dataclass(frozen=True)
class Chunk:
    """A contiguous token window of a document body."""

    chunk_id: str
    doc_id: str
    token_start: int
    token_end: int  # exclusive
    text: str


@dataclass
class IngestReport:
    """Per-reason drop counts for one ingestion run."""

    input: int = 0
    deduped: int = 0
    dropped_no_abstract: int = 0
    dropped_no_body: int = 0
    dropped_abstract_len: int = 0
    dropped_body_len: int = 0
    kept: int = 0
    skipped_lines: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        # The summary object of the corpus-file interface: exactly these keys.
        d = asdict(self)
        d.pop("skipped_lines")
        return d


def parse_corpus(stream: Iterable[str | bytes] | IO, report: IngestReport | None = None) -> list[RawRecord]:
    """Parse line-delimited corpus records.

    Each well-formed line is a JSON object with string fields ``doc_id``,
    ``source``, ``title``, ``abstract`` and an array-of-strings field ``body``.
    Malformed lines and lines with an empty doc_id are skipped; skips are
    recorded on the report as ``(line_number, reason)``.
    """
    records: list[RawRecord] = []
    skipped: list[tuple[int, str]] = []
    for line_no, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8", errors="replace")
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            doc_id = obj["doc_id"]
            body = obj["body"]
            if not isinstance(doc_id, str) or not isinstance(body, list):
                raise TypeError("bad field types")
            record = RawRecord(
                doc_id=doc_id,
                source=str(obj.get("source", "")),
                title=str(obj.get("title", "")),
                abstract_text=str(obj.get("abstract", "")),
                body_paragraphs=tuple(str(p) for p in body),
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            skipped.append((line_no, f"malformed: {exc}"))
            continue
        if not record.doc_id:
            skipped.append((line_no, "empty doc_id"))
            continue
        records.append(record)
    if report is not None:
        report.input += len(records)
        report.skipped_lines.extend(skipped)
    return records


def deduplicate(records: list[RawRecord], report: IngestReport | None = None) -> list[RawRecord]:
    """Keep one record per doc_id: the one with the greater total token count.

    Ties go to the earliest input position. Output preserves the input order
    of each doc_id's first occurrence.
    """
    best: dict[str, tuple[int, RawRecord]] = {}
    order: list[str] = []
    removed = 0
    for record in records:
        tokens = record.token_count()
        if record.doc_id not in best:
            best[record.doc_id] = (tokens, record)
            order.append(record.doc_id)
        else:
            removed += 1
            if tokens > best[record.doc_id][0]:
                best[record.doc_id] = (tokens, record)
    if report is not None:
        report.deduped += removed
    return [best[doc_id][1] for doc_id in order]


def filter_documents(records: list[RawRecord], report: IngestReport | None = None) -> list[Document]:
    """Apply the document filters and convert survivors to :class:`Document`.

    Drops, in order of checks: empty abstract, empty body, abstract longer
    than 300 tokens, body longer than 100 paragraphs.
    """
    docs: list[Document] = []
    for record in records:
        abstract_tokens = tuple(tokenize(record.abstract_text))
        if not abstract_tokens:
            if report is not None:
                report.dropped_no_abstract += 1
            continue
        if not any(tokenize(p) for p in record.body_paragraphs):
            if report is not None:
                report.dropped_no_body += 1
            continue
        if len(abstract_tokens) > MAX_ABSTRACT_TOKENS:
            if report is not None:
                report.dropped_abstract_len += 1
            continue
        # Paragraph boundaries are taken as the source provides them.
        if len(record.body_paragraphs) > MAX_BODY_PARAGRAPHS:
            if report is not None:
                report.dropped_body_len += 1
            continue
        docs.append(
            Document(
                doc_id=record.doc_id,
                title=record.title,
                abstract_text=record.abstract_text,
                abstract_tokens=abstract_tokens,
                body_paragraphs=record.body_paragraphs,
                source=record.source,
            )
        )
    if report is not None:
        report.kept += len(docs)
    return docs


def chunk_spans(body_len: int, window: int = DEFAULT_WINDOW, overlap: int = DEFAULT_OVERLAP) -> list[tuple[int, int]]:
    """Token spans of the sliding window over a body of ``body_len`` tokens.

    Starts run at 0, window-overlap, 2*(window-overlap), ... while the start
    is inside the body. A trailing window entirely contained in the previous
    chunk is suppressed; a tail that extends past it is emitted short.
    """
    if overlap >= window or overlap <= 0 or window <= 0:
        raise InvalidParameterError(f"need 0 < overlap < window, got window={window} overlap={overlap}")
    if body_len <= 0:
        raise InvalidInputError("body is empty")
    spans: list[tuple[int, int]] = []
    stride = window - overlap
    start = 0
    while start < body_len:
        end = min(start + window, body_len)
        if spans and end <= spans[-1][1]:
            break
        spans.append((start, end))
        start += stride
    return spans


def chunk_body(doc: Document, window: int = DEFAULT_WINDOW, overlap: int = DEFAULT_OVERLAP) -> list[Chunk]:
    """Cut the document body into overlapping token-window chunks.

    Chunk text is the original body text sliced at token boundaries, so the
    tokens of chunk i are exactly body_tokens[start_i:end_i].
    """
    body_text = doc.body_text()
    token_spans = tokenize_with_spans(body_text)
    if not token_spans:
        raise InvalidInputError(f"document {doc.doc_id} has no body tokens")
    chunks = []
    for i, (start, end) in enumerate(chunk_spans(len(token_spans), window, overlap)):
        char_start = token_spans[start][1]
        char_end = token_spans[end - 1][2]
        chunks.append(
            Chunk(
                chunk_id=f"{doc.doc_id}#{i:04d}",
                doc_id=doc.doc_id,
                token_start=start,
                token_end=end,
                text=body_text[char_start:char_end],
            )
        )
    return chunks


class CorpusStore:
    """Documents plus their body chunks, with doc_id lookups.

    This is the artifact the ingest step produces and the answer pipeline
    consumes (titles for responses, chunks for span extraction).
    """

    def __init__(self, docs: list[Document], chunks_by_doc: dict[str, list[Chunk]]):
        self.docs = {d.doc_id: d for d in docs}
        self.doc_order = [d.doc_id for d in docs]
        self.chunks_by_doc = chunks_by_doc

    def __len__(self) -> int:
        return len(self.docs)

    def documents(self) -> list[Document]:
        return [self.docs[doc_id] for doc_id in self.doc_order]

    def chunks_for(self, doc_id: str) -> list[Chunk]:
        return self.chunks_by_doc.get(doc_id, [])

    def title_of(self, doc_id: str) -> str:
        doc = self.docs.get(doc_id)
        return doc.title if doc else doc_id

    def save(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with (out / "documents.jsonl").open("w", encoding="utf-8") as fh:
            for doc in self.documents():
                fh.write(json.dumps(doc.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
        with (out / "chunks.jsonl").open("w", encoding="utf-8") as fh:
            for doc_id in self.doc_order:
                for chunk in self.chunks_by_doc.get(doc_id, []):
                    fh.write(json.dumps(asdict(chunk), ensure_ascii=False, sort_keys=True) + "\n")

    @classmethod
    def load(cls, in_dir: str | Path) -> "CorpusStore":
        src = Path(in_dir)
        docs = []
        with (src / "documents.jsonl").open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    docs.append(Document.from_dict(json.loads(line)))
        chunks_by_doc: dict[str, list[Chunk]] = {}
        with (src / "chunks.jsonl").open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    chunk = Chunk(**json.loads(line))
                    chunks_by_doc.setdefault(chunk.doc_id, []).append(chunk)
        return cls(docs, chunks_by_doc)


def ingest_corpus(
    stream: Iterable[str | bytes] | IO,
    window: int = DEFAULT_WINDOW,
    overlap: int = DEFAULT_OVERLAP,
) -> tuple[CorpusStore, IngestReport]:
    """Run the full ingestion pipeline over a corpus stream."""
    report = IngestReport()
    records = parse_corpus(stream, report)
    records = deduplicate(records, report)
    docs = filter_documents(records, report)
    chunks_by_doc = {doc.doc_id: chunk_body(doc, window, overlap) for doc in docs}
    return CorpusStore(docs, chunks_by_doc), report


def iter_corpus_file(path: str | Path) -> Iterator[str]:
    with Path(path).open(encoding="utf-8") as fh:
        yield from fh
