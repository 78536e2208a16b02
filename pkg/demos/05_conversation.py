"""Dialogue routing: smalltalk vs retrieval, with coreference across turns.

A short scripted conversation showing the router sending general turns to the
canned generator and disease turns through retrieval + QA, with "it"
resolving to the disease mentioned earlier in the session.
"""

from litmine.answers import OverlapSpanExtractor
from litmine.corpus import CorpusStore, Document, chunk_body
from litmine.dense import HashedEmbeddingProvider, build_store
from litmine.dialogue import ChatDeps, Session, handle_turn
from litmine.fusion import FusionConfig
from litmine.sparse import build_index, tokenize


def doc(doc_id, title, abstract, body):
    return Document(doc_id=doc_id, title=title, abstract_text=abstract,
                    abstract_tokens=tuple(tokenize(abstract)),
                    body_paragraphs=(body,), source="demo")


docs = [
    doc("d1", "Airborne Spread Study", "covid-19 airborne transmission evidence",
        "Evidence shows covid-19 is airborne in poorly ventilated rooms. Distance alone is not enough."),
    doc("d2", "Vaccine Overview", "covid-19 vaccine protection summary",
        "covid-19 vaccines cut severe disease sharply. Protection wanes slowly over months."),
]

provider = HashedEmbeddingProvider(256)
deps = ChatDeps(
    index=build_index(docs),
    store=build_store(docs, provider),
    corpus=CorpusStore(docs, {d.doc_id: chunk_body(d) for d in docs}),
    embedder=provider,
    extractor=OverlapSpanExtractor(),
    fusion=FusionConfig(bm25_threshold=0.2, cosine_threshold=0.1),
)

session = Session("demo")
for text in ["hi there!", "tell me about covid-19 vaccines", "is it airborne?", "thanks, bye"]:
    response, session = handle_turn(session, text, deps)
    nlu = response.diagnostics.get("nlu", {})
    print(f"you> {text}")
    print(f"     [kind={response.kind}, resolved={nlu.get('resolved_text')!r}]")
    for item in response.items[:2]:
        suffix = f"  — {item.title}" if item.title else ""
        print(f"bot> {item.text}{suffix}")
    print()

print(f"session entities (most recent last): {session.disease_entities}")
print(f"turns recorded: {len(session.turns)}")
