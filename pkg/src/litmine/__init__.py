"""litmine: conversational retrieval and extractive question answering over a
scientific-literature corpus.

Hybrid search combines an Okapi BM25 inverted index over abstracts with
cosine similarity over abstract embeddings; answers are literal spans pulled
from body chunks of the top retrieved documents.
"""

from .answers import (
    AnswerSpan,
    OverlapSpanExtractor,
    RawSpan,
    SpanCandidate,
    SystemResponse,
    answer_pipeline,
    best_span_per_doc,
    filter_span,
    rank_answers,
)
from .corpus import (
    Chunk,
    CorpusStore,
    Document,
    IngestReport,
    RawRecord,
    chunk_body,
    deduplicate,
    filter_documents,
    ingest_corpus,
    parse_corpus,
)
from .dense import (
    DenseStore,
    HashedEmbeddingProvider,
    RemoteEmbeddingProvider,
    build_store,
    cosine,
    dense_scores,
)
from .dialogue import CannedGenerator, ChatDeps, Session, SessionStore, handle_turn
from .errors import (
    ConsistencyError,
    CorruptIndexError,
    InvalidInputError,
    InvalidParameterError,
    LitmineError,
    ProviderError,
    SessionNotFoundError,
)
from .fusion import (
    FusedCandidate,
    FusionConfig,
    RetrievalResult,
    fuse,
    minmax_normalize,
    retrieve,
    threshold_filter,
)
from .nlu import (
    DiseaseDictionary,
    KeywordCovidClassifier,
    TurnAnalysis,
    analyze_turn,
    detect_covid,
    enrich_query,
    resolve_coreference,
)
from .sparse import InvertedIndex, bm25_scores, build_index, load_index, save_index, tokenize
from .treceval import (
    EvalReport,
    GridAxis,
    Qrel,
    Topic,
    binarize,
    compare_strategies,
    f1_for_strategy,
    grid_search,
    parse_qrels,
    parse_topics,
)

__version__ = "0.1.0"
