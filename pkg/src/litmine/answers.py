"""Span extraction over body chunks of retrieved documents, span filtering,
per-document selection, cross-document ranking, and response assembly.

The extractor is pluggable: the shipped default picks the passage sentence
with maximal token overlap with the question (deterministic, no model), and a
remote HTTP client can wire in a real reader.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Protocol, Sequence

from .corpus import CorpusStore
from .errors import ConsistencyError, ProviderError
from .fusion import FusedCandidate, minmax_normalize
from .remote import post_json
from .text import tokenize, tokenize_with_spans

MAX_SPAN_TOKENS = 15
ANSWER_LIMIT = 5
EXTRACTION_DOC_CAP = 20
DEFAULT_ALPHA = 0.5

# Matched as whole whitespace-separated words, with and without brackets, so
# the rule survives extractors with different marker spellings.
RESERVED_MARKERS = frozenset({"[CLS]", "[SEP]", "[PAD]", "CLS", "SEP", "PAD"})

CLARIFICATION_PROMPT = (
    "I could not find any matching literature for that. "
    "Could you rephrase the question or add more detail?"
)


class RawSpan(NamedTuple):
    """What an extractor yields for one passage; provenance is added by the pipeline."""

    text: str
    start_loglik: float
    end_loglik: float


@dataclass(frozen=True)
class SpanCandidate:
    doc_id: str
    chunk_id: str
    text: str
    token_length: int
    start_loglik: float
    end_loglik: float


@dataclass(frozen=True)
class AnswerSpan:
    doc_id: str
    paper_title: str
    text: str
    start_loglik: float
    retrieval_score: float
    final_score: float


class ResponseItem(NamedTuple):
    text: str
    title: str | None


@dataclass
class SystemResponse:
    kind: str  # answers | document_list | clarification | smalltalk
    items: list[ResponseItem]
    diagnostics: dict = field(default_factory=dict)
    answers: list[AnswerSpan] = field(default_factory=list)

    def to_dict(self, include_diagnostics: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "items": [{"text": item.text, "title": item.title} for item in self.items],
        }
        if include_diagnostics:
            out["diagnostics"] = self.diagnostics
        return out


class SpanExtractor(Protocol):
    def extract(self, question: str, passage: str) -> list[RawSpan]: ...


class OverlapSpanExtractor:
    """Default extractor: the passage sentence with maximal token overlap
    with the question, trimmed to MAX_SPAN_TOKENS tokens.

    start/end log-likelihoods are both the overlap count, which makes the
    downstream argmax-by-start-loglik observable without any model.
    """

    def extract(self, question: str, passage: str) -> list[RawSpan]:
        question_tokens = set(tokenize(question))
        if not question_tokens:
            return []
        best_sentence = None
        best_overlap = 0
        for sentence in re.split(r"[.!?]+", passage):
            sentence = sentence.strip()
            if not sentence:
                continue
            overlap = len(question_tokens & set(tokenize(sentence)))
            if overlap > best_overlap:
                best_overlap = overlap
                best_sentence = sentence
        if best_sentence is None:
            return []
        spans = tokenize_with_spans(best_sentence)
        if len(spans) > MAX_SPAN_TOKENS:
            best_sentence = best_sentence[: spans[MAX_SPAN_TOKENS - 1][2]]
        return [RawSpan(best_sentence, float(best_overlap), float(best_overlap))]


class RemoteSpanExtractor:
    """Client for an external reader (POST /extract {question, passage})."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def extract(self, question: str, passage: str) -> list[RawSpan]:
        payload = post_json(
            f"{self.endpoint}/extract",
            {"question": question, "passage": passage},
            timeout=self.timeout,
        )
        if not isinstance(payload, list):
            raise ProviderError("extractor service must return a list of spans")
        return [
            RawSpan(str(s["text"]), float(s["start_loglik"]), float(s["end_loglik"]))
            for s in payload
        ]


def filter_span(span: SpanCandidate, reserved_markers: frozenset[str] = RESERVED_MARKERS) -> str | None:
    """Return None when the span is an eligible answer, else the reject reason.

    Rejects spans longer than MAX_SPAN_TOKENS tokens and spans containing a
    reserved marker as a whole word.
    """
    if span.token_length > MAX_SPAN_TOKENS:
        return "length"
    for word in span.text.split():
        if word in reserved_markers:
            return "marker"
    return None


def best_span_per_doc(spans: Sequence[SpanCandidate]) -> dict[str, SpanCandidate]:
    """Per document, the span whose start token has the highest log-likelihood.

    Ties break toward the smallest (chunk_id, text), ascending.
    """
    best: dict[str, SpanCandidate] = {}
    for span in spans:
        cur = best.get(span.doc_id)
        if (
            cur is None
            or span.start_loglik > cur.start_loglik
            or (span.start_loglik == cur.start_loglik and (span.chunk_id, span.text) < (cur.chunk_id, cur.text))
        ):
            best[span.doc_id] = span
    return best


def rank_answers(
    best: dict[str, SpanCandidate],
    candidates: Sequence[FusedCandidate],
    alpha: float = DEFAULT_ALPHA,
    titles: dict[str, str] | None = None,
    limit: int = ANSWER_LIMIT,
) -> list[AnswerSpan]:
    """Blend normalized start log-likelihood with the normalized aggregated
    retrieval score: final = alpha * loglik_norm + (1 - alpha) * retrieval_norm.

    Both normalizations are min-max over the answer set. Sorted descending by
    final score, ties by doc_id, truncated to ``limit``.
    """
    if not best:
        return []
    aggregated = {c.doc_id: c.aggregated for c in candidates}
    doc_ids = sorted(best)
    missing = [d for d in doc_ids if d not in aggregated]
    if missing:
        raise ConsistencyError(f"answers for docs never retrieved: {missing}")
    titles = titles or {}
    loglik_norm = minmax_normalize([best[d].start_loglik for d in doc_ids])
    retrieval_norm = minmax_normalize([aggregated[d] for d in doc_ids])
    answers = [
        AnswerSpan(
            doc_id=d,
            paper_title=titles.get(d, d),
            text=best[d].text,
            start_loglik=best[d].start_loglik,
            retrieval_score=aggregated[d],
            final_score=alpha * ln + (1.0 - alpha) * rn,
        )
        for d, ln, rn in zip(doc_ids, loglik_norm, retrieval_norm)
    ]
    answers.sort(key=lambda a: (-a.final_score, a.doc_id))
    return answers[:limit]


def answer_pipeline(
    question: str,
    retrieved: Sequence[FusedCandidate],
    corpus: CorpusStore,
    extractor: SpanExtractor,
    alpha: float = DEFAULT_ALPHA,
    reserved_markers: frozenset[str] = RESERVED_MARKERS,
    answer_limit: int = ANSWER_LIMIT,
) -> SystemResponse:
    """Extract spans from the chunks of retrieved documents and assemble the
    response.

    Response kind is a total function of the situation: no documents ->
    clarification; documents but no surviving span -> document_list of the
    top titles; otherwise the ranked answers.
    """
    diag = {
        "docs_considered": 0,
        "chunks_processed": 0,
        "chunks_failed": 0,
        "spans_extracted": 0,
        "rejected_length": 0,
        "rejected_marker": 0,
        "spans_accepted": 0,
    }
    if not retrieved:
        return SystemResponse(
            kind="clarification",
            items=[ResponseItem(CLARIFICATION_PROMPT, None)],
            diagnostics=diag,
        )

    accepted: list[SpanCandidate] = []
    for candidate in retrieved[:EXTRACTION_DOC_CAP]:
        diag["docs_considered"] += 1
        for chunk in corpus.chunks_for(candidate.doc_id):
            try:
                raw_spans = extractor.extract(question, chunk.text)
            except Exception as exc:
                diag["chunks_failed"] += 1
                diag.setdefault("failures", []).append(f"{chunk.chunk_id}: {exc}")
                continue
            diag["chunks_processed"] += 1
            for raw in raw_spans:
                diag["spans_extracted"] += 1
                span = SpanCandidate(
                    doc_id=candidate.doc_id,
                    chunk_id=chunk.chunk_id,
                    text=raw.text,
                    token_length=len(tokenize(raw.text)),
                    start_loglik=raw.start_loglik,
                    end_loglik=raw.end_loglik,
                )
                reason = filter_span(span, reserved_markers)
                if reason is None:
                    accepted.append(span)
                    diag["spans_accepted"] += 1
                else:
                    diag[f"rejected_{reason}"] += 1

    titles = {c.doc_id: corpus.title_of(c.doc_id) for c in retrieved}
    answers = rank_answers(best_span_per_doc(accepted), retrieved, alpha, titles, answer_limit)
    if answers:
        items = [ResponseItem(a.text, a.paper_title) for a in answers]
        return SystemResponse(kind="answers", items=items, diagnostics=diag, answers=answers)

    by_retrieval = sorted(retrieved, key=lambda c: (-c.aggregated, c.doc_id))[:answer_limit]
    items = [ResponseItem(corpus.title_of(c.doc_id), corpus.title_of(c.doc_id)) for c in by_retrieval]
    return SystemResponse(kind="document_list", items=items, diagnostics=diag)
