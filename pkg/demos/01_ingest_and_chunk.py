"""Corpus ingestion walkthrough: parse, dedup, filter, chunk.

Builds a tiny literature corpus inline and shows what survives each stage
and why, ending with the sliding-window body chunks.
"""

import json

from litmine.corpus import chunk_spans, ingest_corpus


def line(doc_id, source, abstract, body):
    return json.dumps({"doc_id": doc_id, "source": source, "title": f"Paper {doc_id}",
                       "abstract": abstract, "body": body})


corpus = [
    # the same paper from two sources; the richer copy wins
    line("p1", "pmc", "covid-19 vaccine efficacy in adults",
         ["A long body paragraph describing the trial in detail with many words."]),
    line("p1", "pdf", "covid-19 vaccine efficacy", ["Short body."]),
    # an abstract over the 300-token limit is dropped
    line("p2", "pmc", " ".join(f"token{i}" for i in range(301)), ["Body."]),
    # a record without an abstract is dropped
    line("p3", "pmc", "", ["Body text."]),
    # a normal record with a body long enough to produce several chunks
    line("p4", "pmc", "aerosol transmission of covid-19 indoors",
         [" ".join(f"w{i}" for i in range(500))]),
]

store, report = ingest_corpus(corpus)

print("drop report:")
print(json.dumps(report.to_dict(), indent=2))

print("\nsurviving documents:")
for doc in store.documents():
    print(f"  {doc.doc_id} ({doc.source}): {len(doc.abstract_tokens)} abstract tokens")

print("\nchunk spans for a 500-token body (window 220, overlap 50):")
print(" ", chunk_spans(500))

print("\nactual chunks of p4:")
for chunk in store.chunks_for("p4"):
    print(f"  {chunk.chunk_id}: tokens [{chunk.token_start}, {chunk.token_end})")
