"""Hybrid retrieval: both arms, thresholds, union, min-max fusion, top-k.

Walks one query through the full inference pipeline and prints each
candidate's raw and normalized scores plus the aggregate used for ranking.
"""

from litmine.corpus import Document
from litmine.dense import HashedEmbeddingProvider, build_store
from litmine.fusion import FusionConfig, retrieve
from litmine.sparse import build_index, tokenize


def doc(doc_id, abstract):
    return Document(doc_id=doc_id, title=f"Paper {doc_id}", abstract_text=abstract,
                    abstract_tokens=tuple(tokenize(abstract)),
                    body_paragraphs=(abstract + ".",), source="demo")


docs = [
    doc("d1", "covid vaccine efficacy randomized trial"),
    doc("d2", "covid vaccine distribution logistics"),
    doc("d3", "vaccine hesitancy survey results"),
    doc("d4", "covid hospitalization statistics"),
    doc("d5", "weather patterns and seasonal illness"),
]

provider = HashedEmbeddingProvider(256)
index = build_index(docs)
store = build_store(docs, provider)

cfg = FusionConfig(bm25_threshold=0.2, cosine_threshold=0.1, top_k=20, strategy="union")
result = retrieve("covid vaccine efficacy", index, store, provider, cfg)

print(f"diagnostics: {result.diagnostics}")
print(f"\n{'doc':4} {'bm25_raw':>9} {'cos_raw':>8} {'bm25_n':>7} {'cos_n':>7} {'agg':>7}")
for c in result.candidates:
    print(f"{c.doc_id:4} {c.bm25_raw:9.4f} {c.cosine_raw:8.4f} "
          f"{c.bm25_norm:7.4f} {c.cosine_norm:7.4f} {c.aggregated:7.4f}")

print("\nsame query, sparse arm only:")
sparse_cfg = FusionConfig(bm25_threshold=0.2, cosine_threshold=0.1, strategy="sparse_only")
for c in retrieve("covid vaccine efficacy", index, store, provider, sparse_cfg).candidates:
    print(f"  {c.doc_id}  agg={c.aggregated:.4f} (= bm25_norm)")
