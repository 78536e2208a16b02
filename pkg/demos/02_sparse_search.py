"""Okapi BM25 over an inverted index of abstracts.

Shows term statistics, the score breakdown for a query, and that the index
serializes to bytes and loads back identically.
"""

from litmine.corpus import Document
from litmine.sparse import bm25_scores, build_index, load_index, save_index, tokenize


def doc(doc_id, abstract):
    return Document(doc_id=doc_id, title=f"Paper {doc_id}", abstract_text=abstract,
                    abstract_tokens=tuple(tokenize(abstract)),
                    body_paragraphs=(abstract + ".",), source="demo")


docs = [
    doc("d1", "covid vaccine efficacy in a randomized trial"),
    doc("d2", "influenza vaccine uptake among adults"),
    doc("d3", "covid transmission in indoor environments"),
    doc("d4", "genome sequencing of coronavirus variants"),
    doc("d5", "economic effects of pandemic lockdowns"),
]

index = build_index(docs)
print(f"{index.doc_count} docs, {len(index.term_postings)} terms, avgdl {index.avg_doc_length:.2f}")

query = "covid vaccine"
print(f"\nidf of query terms for {query!r}:")
for term in tokenize(query):
    postings = index.term_postings.get(term, [])
    print(f"  {term}: df={len(postings)} idf={index.idf(term):.4f}")

print("\nranking:")
for doc_id, score in bm25_scores(index, tokenize(query)):
    print(f"  {doc_id}  {score:.4f}")

blob = save_index(index)
restored = load_index(blob)
print(f"\nserialized to {len(blob)} bytes; round-trip equal: {restored == index}")
