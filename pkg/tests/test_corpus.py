import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from litmine.corpus import (
    IngestReport,
    RawRecord,
    chunk_body,
    chunk_spans,
    deduplicate,
    filter_documents,
    ingest_corpus,
    parse_corpus,
    CorpusStore,
)
from litmine.errors import InvalidParameterError
from litmine.text import tokenize

from conftest import corpus_line, make_doc


def record(doc_id, abstract="covid study", body=("some body text",), source="pmc"):
    return RawRecord(
        doc_id=doc_id, source=source, title=f"T {doc_id}",
        abstract_text=abstract, body_paragraphs=tuple(body),
    )


class TestParseCorpus:
    def test_single_well_formed_line(self):
        records = parse_corpus([corpus_line("d1", "abstract text", ["body"])])
        assert len(records) == 1
        assert records[0].doc_id == "d1"
        assert records[0].body_paragraphs == ("body",)

    def test_empty_stream(self):
        assert parse_corpus([]) == []

    def test_malformed_middle_line_is_skipped_and_reported(self):
        report = IngestReport()
        lines = [
            corpus_line("d1", "a", ["b"]),
            "{not json",
            corpus_line("d2", "a", ["b"]),
        ]
        records = parse_corpus(lines, report)
        assert [r.doc_id for r in records] == ["d1", "d2"]
        assert len(report.skipped_lines) == 1
        assert report.skipped_lines[0][0] == 2

    def test_empty_doc_id_skipped(self):
        report = IngestReport()
        records = parse_corpus([corpus_line("", "a", ["b"])], report)
        assert records == []
        assert report.skipped_lines[0][1] == "empty doc_id"

    def test_bytes_input(self):
        records = parse_corpus([corpus_line("d1", "a", ["b"]).encode("utf-8")])
        assert records[0].doc_id == "d1"


class TestDeduplicate:
    def test_higher_token_source_wins(self):
        low = record("x", abstract="short one", body=("tiny",), source="A")
        high = record("x", abstract="a much longer abstract with many more tokens",
                      body=("and a longer body to go with it",), source="B")
        kept = deduplicate([low, high])
        assert len(kept) == 1
        assert kept[0].source == "B"

    def test_no_duplicates_identity(self):
        records = [record("a"), record("b")]
        assert deduplicate(records) == records

    def test_tie_keeps_first_occurrence(self):
        first = record("x", abstract="same size", source="A")
        second = record("x", abstract="size same", source="B")
        kept = deduplicate([first, second])
        assert kept[0].source == "A"

    def test_idempotent(self, rng):
        records = [record(f"d{rng.randrange(5)}", abstract=" ".join("w" for _ in range(rng.randrange(1, 8))))
                   for _ in range(20)]
        once = deduplicate(records)
        assert deduplicate(once) == once

    def test_counts_removed(self):
        report = IngestReport()
        deduplicate([record("x"), record("x"), record("y")], report)
        assert report.deduped == 1


class TestFilterDocuments:
    def test_abstract_301_tokens_dropped(self):
        report = IngestReport()
        r = record("big", abstract=" ".join(f"w{i}" for i in range(301)))
        assert filter_documents([r], report) == []
        assert report.dropped_abstract_len == 1

    def test_body_101_paragraphs_dropped(self):
        report = IngestReport()
        r = record("wide", body=tuple(f"para {i}" for i in range(101)))
        assert filter_documents([r], report) == []
        assert report.dropped_body_len == 1

    def test_boundary_300_tokens_100_paragraphs_kept(self):
        r = record(
            "edge",
            abstract=" ".join(f"w{i}" for i in range(300)),
            body=tuple(f"para {i}" for i in range(100)),
        )
        docs = filter_documents([r])
        assert len(docs) == 1
        assert len(docs[0].abstract_tokens) == 300
        assert len(docs[0].body_paragraphs) == 100

    def test_missing_abstract_or_body_dropped_first(self):
        report = IngestReport()
        no_abstract = record("na", abstract="  ")
        no_body = record("nb", body=("", "..."))
        filter_documents([no_abstract, no_body], report)
        assert report.dropped_no_abstract == 1
        assert report.dropped_no_body == 1

    def test_output_satisfies_document_invariants(self, rng):
        records = []
        for i in range(120):
            abstract = " ".join(f"t{rng.randrange(40)}" for _ in range(rng.randrange(0, 320)))
            body = tuple(f"para {j}" for j in range(rng.randrange(0, 120)))
            records.append(record(f"d{i}", abstract=abstract, body=body))
        for doc in filter_documents(records):
            assert 1 <= len(doc.abstract_tokens) <= 300
            assert 1 <= len(doc.body_paragraphs) <= 100
            assert doc.abstract_tokens == tuple(tokenize(doc.abstract_text))


class TestChunking:
    def test_body_500_exact_spans(self):
        assert chunk_spans(500) == [(0, 220), (170, 390), (340, 500)]

    def test_body_shorter_than_window(self):
        assert chunk_spans(200) == [(0, 200)]

    def test_body_exactly_window_suppresses_tail(self):
        assert chunk_spans(220) == [(0, 220)]

    def test_overlap_ge_window_rejected(self):
        with pytest.raises(InvalidParameterError):
            chunk_spans(100, window=50, overlap=50)

    @given(st.integers(min_value=1, max_value=5000))
    @settings(max_examples=300, deadline=None)
    def test_span_properties(self, body_len):
        spans = chunk_spans(body_len)
        assert spans[0][0] == 0
        assert spans[-1][1] == body_len
        for start, end in spans:
            assert 0 < end - start <= 220
        for (s0, e0), (s1, e1) in zip(spans, spans[1:]):
            assert e0 - s1 == 50  # consecutive overlap
            assert e1 > e0  # no chunk contained in its predecessor
        # full coverage without gaps
        covered = set()
        for start, end in spans:
            covered.update(range(start, end))
        assert covered == set(range(body_len))

    def test_chunk_text_reconstructs_body_tokens(self, rng):
        for _ in range(25):
            n = rng.randrange(1, 900)
            words = [f"w{rng.randrange(50)}" for _ in range(n)]
            paragraphs = []
            while words:
                take = min(len(words), rng.randrange(1, 60))
                paragraphs.append(" ".join(words[:take]) + ".")
                words = words[take:]
            doc = make_doc("d", "abstract", tuple(paragraphs))
            body_tokens = tokenize(doc.body_text())
            chunks = chunk_body(doc)
            for chunk in chunks:
                assert tokenize(chunk.text) == body_tokens[chunk.token_start:chunk.token_end]
            rebuilt = []
            for chunk, nxt in zip(chunks, chunks[1:]):
                rebuilt.extend(tokenize(chunk.text)[: nxt.token_start - chunk.token_start])
            rebuilt.extend(tokenize(chunks[-1].text))
            assert rebuilt == body_tokens

    def test_chunk_ids_carry_doc_and_ordinal(self):
        doc = make_doc("paper-7", "abstract", (" ".join(f"w{i}" for i in range(390)),))
        chunks = chunk_body(doc)
        assert [c.chunk_id for c in chunks] == ["paper-7#0000", "paper-7#0001"]
        assert [(c.token_start, c.token_end) for c in chunks] == [(0, 220), (170, 390)]


class TestIngestPipeline:
    def test_six_record_fixture_with_dup_and_oversized_abstract(self):
        # One cross-source duplicate (pmc copy has more tokens and wins) and
        # one oversized abstract: 6 records -> kept 4.
        big_abstract = " ".join(f"w{i}" for i in range(301))
        lines = [
            corpus_line("dup", "a rich abstract with plenty of tokens", ["longer body", "more text"], source="pmc"),
            corpus_line("dup", "short", ["tiny"], source="pdf"),
            corpus_line("over", big_abstract, ["body text"]),
            corpus_line("k1", "first kept abstract", ["body one"]),
            corpus_line("k2", "second kept abstract", ["body two"]),
            corpus_line("k3", "third kept abstract", ["body three"]),
        ]
        store, report = ingest_corpus(lines)
        assert report.to_dict() == {
            "input": 6,
            "deduped": 1,
            "dropped_no_abstract": 0,
            "dropped_no_body": 0,
            "dropped_abstract_len": 1,
            "dropped_body_len": 0,
            "kept": 4,
        }
        assert sorted(store.docs) == ["dup", "k1", "k2", "k3"]
        assert store.docs["dup"].source == "pmc"

    def test_store_round_trip(self, tmp_path):
        lines = [corpus_line(f"d{i}", f"abstract number {i} covid", [f"body {i}. text."]) for i in range(4)]
        store, _ = ingest_corpus(lines)
        store.save(tmp_path)
        loaded = CorpusStore.load(tmp_path)
        assert loaded.doc_order == store.doc_order
        assert loaded.docs == store.docs
        for doc_id in store.doc_order:
            assert loaded.chunks_for(doc_id) == store.chunks_for(doc_id)

    def test_titles_lookup(self):
        store, _ = ingest_corpus([corpus_line("d1", "abstract", ["body"], title="A Fine Paper")])
        assert store.title_of("d1") == "A Fine Paper"
        assert store.title_of("missing") == "missing"
