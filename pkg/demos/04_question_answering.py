"""Span extraction over body chunks of retrieved documents.

Retrieves for a question, runs the default overlap extractor over each
document's chunks, and shows the span filters, the per-document argmax, and
the final blended ranking. Also triggers the two fallback responses.
"""

from litmine.answers import answer_pipeline, OverlapSpanExtractor
from litmine.corpus import CorpusStore, Document, chunk_body
from litmine.dense import HashedEmbeddingProvider, build_store
from litmine.fusion import FusionConfig, retrieve
from litmine.sparse import build_index, tokenize


def doc(doc_id, title, abstract, body):
    return Document(doc_id=doc_id, title=title, abstract_text=abstract,
                    abstract_tokens=tuple(tokenize(abstract)),
                    body_paragraphs=(body,), source="demo")


docs = [
    doc("d1", "Vaccine Efficacy Study", "covid vaccine efficacy trial",
        "The study enrolled forty thousand adults. The covid vaccine efficacy reached "
        "ninety five percent. Follow up lasted six months."),
    doc("d2", "Transmission Review", "covid transmission indoors",
        "Aerosols carry covid indoors. Ventilation and filtration lower transmission."),
    doc("d3", "Bread Chemistry", "sourdough fermentation",
        "Wild yeast ferments the dough slowly. The crust forms at high heat."),
]

provider = HashedEmbeddingProvider(256)
index = build_index(docs)
store = build_store(docs, provider)
corpus = CorpusStore(docs, {d.doc_id: chunk_body(d) for d in docs})
extractor = OverlapSpanExtractor()
cfg = FusionConfig(bm25_threshold=0.2, cosine_threshold=0.1)

question = "what efficacy did the covid vaccine reach"
retrieved = retrieve(question, index, store, provider, cfg).candidates
response = answer_pipeline(question, retrieved, corpus, extractor)

print(f"question: {question}")
print(f"response kind: {response.kind}")
for rank, item in enumerate(response.items, 1):
    print(f"  {rank}. {item.text!r}  — {item.title}")
print(f"stage counts: {response.diagnostics}")

print("\nno documents retrieved -> clarification:")
print(" ", answer_pipeline(question, [], corpus, extractor).items[0].text)

print("\nretrieved but no surviving span -> document list:")
class NoSpans:
    def extract(self, question, passage):
        return []

fallback = answer_pipeline(question, retrieved, corpus, NoSpans())
print(f"  kind={fallback.kind}: {[item.title for item in fallback.items]}")
