import json
import random

import pytest

from litmine.corpus import Document
from litmine.sparse import tokenize


def make_doc(doc_id: str, abstract: str, body: tuple[str, ...] | None = None, title: str | None = None) -> Document:
    return Document(
        doc_id=doc_id,
        title=title or f"Paper {doc_id}",
        abstract_text=abstract,
        abstract_tokens=tuple(tokenize(abstract)),
        body_paragraphs=body or (abstract + ".",),
        source="test",
    )


def corpus_line(doc_id, abstract, body, source="pmc", title=None) -> str:
    return json.dumps(
        {
            "doc_id": doc_id,
            "source": source,
            "title": title or f"Paper {doc_id}",
            "abstract": abstract,
            "body": list(body),
        }
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20121)


@pytest.fixture
def small_docs() -> list[Document]:
    return [
        make_doc("d1", "covid vaccine"),
        make_doc("d2", "flu vaccine"),
        make_doc("d3", "covid spread"),
    ]
