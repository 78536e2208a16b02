import math
import random

import pytest

from litmine.errors import CorruptIndexError, InvalidInputError
from litmine.sparse import (
    InvertedIndex,
    Posting,
    bm25_scores,
    build_index,
    load_index,
    save_index,
    tokenize,
)

from conftest import make_doc


def bm25_oracle(docs, query_tokens, k1=1.5, b=0.75):
    """Direct-formula reference: no index, no postings, just the definition."""
    token_lists = [list(d.abstract_tokens) for d in docs]
    n = len(docs)
    avgdl = sum(len(t) for t in token_lists) / n
    df = {}
    for tokens in token_lists:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    results = []
    for doc, tokens in zip(docs, token_lists):
        score = 0.0
        for term in query_tokens:
            tf = tokens.count(term)
            if tf == 0:
                continue
            idf = math.log(1.0 + (n - df[term] + 0.5) / (df[term] + 0.5))
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len(tokens) / avgdl))
        if any(t in tokens for t in query_tokens):
            results.append((doc.doc_id, score))
    results.sort(key=lambda pair: (-pair[1], pair[0]))
    return results


class TestTokenize:
    def test_splits_and_lowercases(self):
        assert tokenize("Covid-19 spreads FAST.") == ["covid", "19", "spreads", "fast"]

    def test_empty(self):
        assert tokenize("") == []

    def test_hyphenated_terms(self):
        assert tokenize("SARS-CoV-2") == ["sars", "cov", "2"]


class TestBuildIndex:
    def test_postings_from_two_docs(self):
        docs = [make_doc("d1", "covid vaccine"), make_doc("d2", "flu vaccine")]
        index = build_index(docs)
        assert index.term_postings["vaccine"] == [Posting(0, 1), Posting(1, 1)]
        assert index.term_postings["covid"] == [Posting(0, 1)]

    def test_avg_doc_length(self):
        docs = [make_doc("d1", "one two"), make_doc("d2", "one two three four")]
        assert build_index(docs).avg_doc_length == 3.0

    def test_single_doc_avg(self):
        index = build_index([make_doc("d1", "a b c")])
        assert index.avg_doc_length == 3.0

    def test_empty_docs_rejected(self):
        with pytest.raises(InvalidInputError):
            build_index([])

    def test_duplicate_ids_rejected(self):
        with pytest.raises(InvalidInputError):
            build_index([make_doc("d", "a"), make_doc("d", "b")])


class TestBm25Scores:
    def test_hand_derived_three_doc_corpus(self):
        docs = [make_doc("d1", "covid vaccine"), make_doc("d2", "flu vaccine"),
                make_doc("d3", "covid spread")]
        index = build_index(docs)
        scored = dict(bm25_scores(index, ["covid", "vaccine"]))
        # All docs have length 2 = avgdl, so every matched term contributes
        # exactly its idf = ln(1.6); frozen from the hand evaluation.
        assert scored["d1"] == pytest.approx(2 * math.log(1.6), abs=1e-9)
        assert scored["d2"] == pytest.approx(math.log(1.6), abs=1e-9)
        assert scored["d3"] == pytest.approx(math.log(1.6), abs=1e-9)
        ranked = [d for d, _ in bm25_scores(index, ["covid", "vaccine"])]
        assert ranked == ["d1", "d2", "d3"]  # tie d2/d3 broken by doc_id

    def test_matches_oracle(self):
        docs = [make_doc("d1", "covid vaccine"), make_doc("d2", "flu vaccine"),
                make_doc("d3", "covid spread")]
        index = build_index(docs)
        assert bm25_scores(index, ["covid", "vaccine"]) == pytest.approx(
            bm25_oracle(docs, ["covid", "vaccine"])
        )

    def test_no_matching_terms(self):
        index = build_index([make_doc("d1", "covid vaccine")])
        assert bm25_scores(index, ["zebra"]) == []
        assert bm25_scores(index, []) == []

    def test_identical_docs_score_equally(self):
        docs = [make_doc(f"d{i}", "covid vaccine trial") for i in range(4)]
        scores = [s for _, s in bm25_scores(build_index(docs), ["covid"])]
        assert len(set(scores)) == 1

    def test_duplicate_query_tokens_sum_per_occurrence(self):
        docs = [make_doc("d1", "covid vaccine"), make_doc("d2", "flu shot")]
        index = build_index(docs)
        single = dict(bm25_scores(index, ["covid"]))["d1"]
        double = dict(bm25_scores(index, ["covid", "covid"]))["d1"]
        assert double == pytest.approx(2 * single, abs=1e-12)

    def test_randomized_oracle_equivalence(self, rng):
        vocab = [f"t{i}" for i in range(20)]
        for _ in range(60):
            n_docs = rng.randrange(1, 11)
            docs = [
                make_doc(f"d{i}", " ".join(rng.choice(vocab) for _ in range(rng.randrange(1, 30))))
                for i in range(n_docs)
            ]
            index = build_index(docs)
            for _ in range(5):
                query = [rng.choice(vocab) for _ in range(rng.randrange(1, 6))]
                got = bm25_scores(index, query)
                want = bm25_oracle(docs, query)
                assert [d for d, _ in got] == [d for d, _ in want]
                for (_, gs), (_, ws) in zip(got, want):
                    assert abs(gs - ws) < 1e-9

    def test_extra_occurrence_never_lowers_rank(self, rng):
        # Pad another doc equally so length normalization stays fixed.
        for tf in range(1, 6):
            docs = [
                make_doc("target", " ".join(["covid"] * tf + ["x"] * (10 - tf))),
                make_doc("rival", " ".join(["covid"] * 1 + ["y"] * 9)),
            ]
            index = build_index(docs)
            ranked = [d for d, _ in bm25_scores(index, ["covid"])]
            assert ranked[0] == "target" or tf == 1

    def test_idf_strictly_positive(self):
        for n, df in [(1, 1), (5, 5), (100, 100), (100, 1)]:
            docs = [make_doc(f"d{i}", "common" if i < df else "other") for i in range(n)]
            index = build_index(docs)
            assert index.idf("common") > 0.0


class TestPersistence:
    def test_round_trip_identity(self, small_docs):
        index = build_index(small_docs)
        loaded = load_index(save_index(index))
        assert loaded == index
        assert bm25_scores(loaded, ["covid", "vaccine"]) == bm25_scores(index, ["covid", "vaccine"])

    def test_byte_identical_rebuild(self, small_docs):
        a = save_index(build_index(small_docs))
        b = save_index(build_index(list(small_docs)))
        assert a == b

    def test_truncated_stream_rejected(self, small_docs):
        data = save_index(build_index(small_docs))
        for cut in (0, 3, 10, len(data) - 1):
            with pytest.raises(CorruptIndexError):
                load_index(data[:cut])

    def test_trailing_garbage_rejected(self, small_docs):
        data = save_index(build_index(small_docs))
        with pytest.raises(CorruptIndexError):
            load_index(data + b"\x00")

    def test_bad_magic_rejected(self, small_docs):
        data = save_index(build_index(small_docs))
        with pytest.raises(CorruptIndexError):
            load_index(b"XXXX" + data[4:])

    def test_version_mismatch_rejected(self, small_docs):
        data = bytearray(save_index(build_index(small_docs)))
        data[4] = 99
        with pytest.raises(CorruptIndexError):
            load_index(bytes(data))

    def test_empty_term_index_round_trip(self):
        index = InvertedIndex({}, [2, 3], ["a", "b"])
        assert load_index(save_index(index)) == index
