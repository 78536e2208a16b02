"""Per-session conversation state and turn routing.

A turn is either disease-related (routed through retrieval + span extraction)
or general chit-chat (routed to a pluggable response generator). Sessions
live in an in-memory store with TTL expiry and an optional JSON snapshot.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Protocol

from .answers import CLARIFICATION_PROMPT, ResponseItem, SpanExtractor, SystemResponse, answer_pipeline
from .corpus import CorpusStore
from .dense import DenseStore, EmbeddingProvider
from .errors import InvalidInputError, ProviderError, SessionNotFoundError
from .fusion import FusionConfig, retrieve
from .nlu import CovidClassifier, DiseaseDictionary, analyze_turn
from .remote import post_json
from .sparse import InvertedIndex

DEFAULT_SESSION_TTL = 3600.0


class Turn(NamedTuple):
    speaker: str  # "user" | "bot"
    text: str
    timestamp: float


@dataclass
class Session:
    session_id: str
    turns: list[Turn] = field(default_factory=list)
    disease_entities: list[str] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    last_active: float = field(default_factory=time.time)

    def append_turn(self, speaker: str, text: str) -> None:
        now = time.time()
        if self.turns and now <= self.turns[-1].timestamp:
            now = self.turns[-1].timestamp + 1e-6
        self.turns.append(Turn(speaker, text, now))
        self.last_active = max(self.last_active, now)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "turns": [list(t) for t in self.turns],
            "disease_entities": self.disease_entities,
            "created_at": self.created_at,
            "last_active": self.last_active,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Session":
        return cls(
            session_id=obj["session_id"],
            turns=[Turn(*t) for t in obj["turns"]],
            disease_entities=list(obj["disease_entities"]),
            created_at=obj["created_at"],
            last_active=obj["last_active"],
        )


class Generator(Protocol):
    def generate(self, history: list[Turn]) -> str: ...


class CannedGenerator:
    """Deterministic stand-in for a dialogue model: a fixed response table
    keyed by a stable hash of the last user turn."""

    GREETING = "Hello! Ask me anything about the coronavirus research literature."

    RESPONSES = (
        "That's interesting. I'm best at digging through research papers, though.",
        "I see. Is there anything from the medical literature I can look up for you?",
        "Good point. I spend most of my time reading papers about coronaviruses.",
        "Fair enough! Feel free to ask me about the research literature.",
        "I hear you. When you're ready, ask me a research question.",
        "Nice chatting! I can also search the literature if you have a question.",
    )

    def generate(self, history: list[Turn]) -> str:
        last_user = next((t.text for t in reversed(history) if t.speaker == "user"), None)
        if last_user is None:
            return self.GREETING
        digest = hashlib.sha256(last_user.encode("utf-8")).digest()
        return self.RESPONSES[int.from_bytes(digest[:4], "big") % len(self.RESPONSES)]


class RemoteGenerator:
    """Client for an external dialogue model (POST /generate {history})."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def generate(self, history: list[Turn]) -> str:
        payload = post_json(
            f"{self.endpoint}/generate",
            {"history": [{"speaker": t.speaker, "text": t.text} for t in history]},
            timeout=self.timeout,
        )
        text = payload.get("text") if isinstance(payload, dict) else None
        if not text or not isinstance(text, str):
            raise ProviderError("generator returned an empty response")
        return text


@dataclass
class ChatDeps:
    """Everything a turn needs: artifacts, providers, and tuning knobs."""

    index: InvertedIndex
    store: DenseStore | None
    corpus: CorpusStore
    embedder: EmbeddingProvider | None
    extractor: SpanExtractor
    classifier: CovidClassifier | None = None
    generator: Generator = field(default_factory=CannedGenerator)
    dictionary: DiseaseDictionary = field(default_factory=DiseaseDictionary.default)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    alpha: float = 0.5


def handle_turn(session: Session, utterance: str, deps: ChatDeps) -> tuple[SystemResponse, Session]:
    """Route one user turn and update the session.

    Disease-related turns run coreference -> enrichment -> retrieval -> span
    extraction; everything else goes to the response generator. The session
    gains exactly two turns (user + bot) and any newly matched entities.
    """
    utterance = utterance.strip()
    if not utterance:
        raise InvalidInputError("utterance is empty")

    analysis = analyze_turn(utterance, session.disease_entities, deps.classifier, deps.dictionary)
    if analysis.is_covid:
        try:
            result = retrieve(analysis.enriched_text, deps.index, deps.store, deps.embedder, deps.fusion)
            response = answer_pipeline(
                analysis.resolved_text, result.candidates, deps.corpus, deps.extractor, deps.alpha
            )
            response.diagnostics["retrieval"] = result.diagnostics
            if result.warnings:
                response.diagnostics.setdefault("warnings", []).extend(result.warnings)
        except Exception as exc:
            response = SystemResponse(
                kind="clarification",
                items=[ResponseItem(CLARIFICATION_PROMPT, None)],
                diagnostics={"error": f"{type(exc).__name__}: {exc}"},
            )
    else:
        history = session.turns + [Turn("user", utterance, time.time())]
        try:
            text = deps.generator.generate(history)
        except ProviderError as exc:
            text = CannedGenerator().generate(history)
            response_warning = f"generator failed ({exc}); used canned response"
        else:
            response_warning = None
        response = SystemResponse(kind="smalltalk", items=[ResponseItem(text, None)])
        if response_warning:
            response.diagnostics.setdefault("warnings", []).append(response_warning)

    response.diagnostics["nlu"] = {
        "resolved_text": analysis.resolved_text,
        "is_covid": analysis.is_covid,
        "confidence": analysis.confidence,
        "enriched_text": analysis.enriched_text,
        "matched_entities": analysis.matched_entities,
    }
    if analysis.warnings:
        response.diagnostics.setdefault("warnings", []).extend(analysis.warnings)

    session.append_turn("user", utterance)
    session.append_turn("bot", response.items[0].text if response.items else "")
    session.disease_entities.extend(analysis.matched_entities)
    return response, session


class SessionStore:
    """In-memory session store with TTL expiry and per-session turn locks."""

    def __init__(self, ttl: float = DEFAULT_SESSION_TTL):
        self.ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._mutex = threading.RLock()

    def create(self, session_id: str | None = None) -> Session:
        with self._mutex:
            sid = session_id or uuid.uuid4().hex
            if sid in self._sessions:
                raise InvalidInputError(f"session {sid} already exists")
            session = Session(session_id=sid)
            self._sessions[sid] = session
            self._locks[sid] = threading.Lock()
            return session

    def get(self, session_id: str) -> Session:
        with self._mutex:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise SessionNotFoundError(session_id) from None

    def touch(self, session_id: str) -> None:
        with self._mutex:
            session = self.get(session_id)
            session.last_active = max(session.last_active, time.time())

    def lock_for(self, session_id: str) -> threading.Lock:
        """Turns within one session are serialized through this lock."""
        with self._mutex:
            self.get(session_id)
            return self._locks[session_id]

    def expire(self, now: float | None = None) -> list[str]:
        """Drop sessions idle beyond the TTL; returns the dropped ids."""
        now = time.time() if now is None else now
        with self._mutex:
            stale = [sid for sid, s in self._sessions.items() if now - s.last_active > self.ttl]
            for sid in stale:
                del self._sessions[sid]
                del self._locks[sid]
            return stale

    def __len__(self) -> int:
        with self._mutex:
            return len(self._sessions)

    def save_snapshot(self, path: str | Path) -> None:
        with self._mutex:
            payload = [s.to_dict() for s in self._sessions.values()]
        Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load_snapshot(cls, path: str | Path, ttl: float = DEFAULT_SESSION_TTL) -> "SessionStore":
        store = cls(ttl=ttl)
        for obj in json.loads(Path(path).read_text(encoding="utf-8")):
            session = Session.from_dict(obj)
            store._sessions[session.session_id] = session
            store._locks[session.session_id] = threading.Lock()
        return store
