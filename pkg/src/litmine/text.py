"""Shared tokenizer.

Every module that counts or matches tokens (ingestion filters, the inverted
index, chunking, span-length checks, the default embedder) goes through this
one tokenizer so their notions of "token" agree.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[0-9a-z]+")
_TOKEN_RE_ANYCASE = re.compile(r"[0-9A-Za-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on every non-alphanumeric character.

    Empty fragments are dropped; order is preserved.
    "Covid-19 spreads FAST." -> ["covid", "19", "spreads", "fast"]
    """
    return _TOKEN_RE.findall(text.lower())


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Like :func:`tokenize` but each token carries its (start, end) character
    offsets in the original string, so callers can slice the source text at
    token boundaries (used by body chunking to keep original casing and
    punctuation inside a chunk).
    """
    return [
        (m.group(0).lower(), m.start(), m.end())
        for m in _TOKEN_RE_ANYCASE.finditer(text)
    ]


def count_tokens(text: str) -> int:
    return len(_TOKEN_RE_ANYCASE.findall(text))
