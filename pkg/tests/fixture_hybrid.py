"""Constructed 30-doc corpus where the sparse and dense arms retrieve
disjoint halves of the relevant set.

Five "keyword" documents carry the literal query terms (high BM25) but are
padded with filler tokens so their query cosine is low; five "semantic"
documents carry no query term at all (invisible to BM25) but are built from
tokens that hash into the query tokens' embedding buckets, giving cosine 1.0.
Distractor tiers sit between them so neither single arm can sweep the other
arm's half without taking false positives first:

    cosine ladder:  semantic 1.0 > near-miss 0.816 > keyword-distractor 0.408
                    > keyword-doc ~0.35 > plain 0.0
    bm25 ladder:    keyword-doc >> keyword-distractor >> (absent)

Hand-applied optimum per strategy (10 relevant docs, 20 judged non-relevant):
sparse_only retrieves exactly the 5 keyword docs (P=1, R=.5, F1=2/3);
dense_only can do no better than F1=2/3 either; the union takes both halves
with no false positive: F1=1.0.
"""

from litmine.corpus import Document
from litmine.dense import HashedEmbeddingProvider
from litmine.sparse import tokenize
from litmine.treceval import Qrel, Topic

QUERY = "covid vaccine efficacy"
DIMENSION = 768


def _make_doc(doc_id: str, tokens: list[str]) -> Document:
    text = " ".join(tokens)
    return Document(
        doc_id=doc_id,
        title=f"Study {doc_id}",
        abstract_text=text,
        abstract_tokens=tuple(tokenize(text)),
        body_paragraphs=(text + ".",),
        source="fixture",
    )


def _collision_token(provider: HashedEmbeddingProvider, bucket: int, taken: set[str]) -> str:
    for i in range(100000):
        token = f"c{i}"
        if token in taken:
            continue
        if provider.bucket(token) == bucket:
            taken.add(token)
            return token
    raise AssertionError("no collision token found")


def _filler_tokens(provider: HashedEmbeddingProvider, n: int, forbidden_buckets: set[int]) -> list[str]:
    out: list[str] = []
    used_buckets = set(forbidden_buckets)
    i = 0
    while len(out) < n:
        token = f"f{i}"
        i += 1
        bucket = provider.bucket(token)
        if bucket in used_buckets:
            continue
        used_buckets.add(bucket)
        out.append(token)
    return out


def build_disjoint_fixture():
    """Returns (docs, topics, qrels, provider, relevant_ids)."""
    provider = HashedEmbeddingProvider(DIMENSION)
    query_tokens = tokenize(QUERY)
    query_buckets = {provider.bucket(t) for t in query_tokens}
    assert len(query_buckets) == 3, "query tokens must occupy distinct buckets"

    taken = set(query_tokens)
    collisions = [_collision_token(provider, provider.bucket(t), taken) for t in query_tokens]
    fillers = _filler_tokens(provider, 170, query_buckets)

    docs: list[Document] = []
    relevant: list[str] = []

    # Sparse half of the relevant set: every query token twice + 88 fillers.
    for i in range(5):
        doc_id = f"s{i}"
        docs.append(_make_doc(doc_id, [t for t in query_tokens for _ in range(2)] + fillers[:88]))
        relevant.append(doc_id)

    # Dense half of the relevant set: pure collision tokens, cosine 1.0.
    for i in range(5):
        doc_id = f"d{i}"
        docs.append(_make_doc(doc_id, list(collisions)))
        relevant.append(doc_id)

    # Near-miss dense distractors (non-relevant): 2 of 3 collision tokens.
    for i in range(5):
        docs.append(_make_doc(f"n{i}", collisions[:2]))

    # Keyword distractors (non-relevant): one real query token + one filler.
    for i in range(5):
        docs.append(_make_doc(f"m{i}", [query_tokens[0], fillers[88 + i]]))

    # Plain non-relevant documents: fillers only.
    for i in range(10):
        docs.append(_make_doc(f"p{i}", fillers[93 + 7 * i : 100 + 7 * i]))

    topics = [Topic("t1", QUERY)]
    qrels = [Qrel("t1", d.doc_id, (2 if d.doc_id.startswith("s") else 1) if d.doc_id in relevant else 0)
             for d in docs]
    return docs, topics, qrels, provider, set(relevant)
