"""Turn understanding: rule-based coreference on the latest user turn,
disease-topic detection, and keyword enrichment of on-topic queries.

The detector is pluggable; the shipped default is a transparent dictionary
matcher over three disease families (COVID / SARS / MERS), so routing is
deterministic without any trained classifier.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .errors import ProviderError
from .remote import post_json

# Pronouns and definite phrases the resolver rewrites to the most recent
# disease entity from the session.
_PRONOUNS = ("it", "this", "that")
_DEFINITE_PHRASES = ("the virus", "the disease")

REMOTE_CLASSIFIER_THRESHOLD = 0.5


def _word_pattern(term: str) -> re.Pattern:
    # Hyphens count as word characters so an alias "sars" does not match
    # inside "sars-cov-2".
    return re.compile(rf"(?<![a-z0-9-]){re.escape(term.lower())}(?![a-z0-9-])")


@dataclass(frozen=True)
class DiseaseFamily:
    name: str
    aliases: tuple[str, ...]
    expansions: tuple[str, ...]

    @property
    def canonical(self) -> str:
        return self.expansions[0] if self.expansions else self.name


class DiseaseDictionary:
    """Alias table mapping disease families to matching and expansion terms."""

    def __init__(self, families: list[DiseaseFamily]):
        self.families = families
        self._alias_patterns = {
            family.name: [_word_pattern(a) for a in family.aliases]
            for family in families
        }

    def match_families(self, text: str) -> list[DiseaseFamily]:
        lowered = text.lower()
        return [
            family
            for family in self.families
            if any(p.search(lowered) for p in self._alias_patterns[family.name])
        ]

    def matches(self, text: str) -> bool:
        return bool(self.match_families(text))

    @classmethod
    def default(cls) -> "DiseaseDictionary":
        return cls(
            [
                DiseaseFamily(
                    name="covid",
                    aliases=("covid", "covid-19", "covid19", "sars-cov-2", "coronavirus", "ncov", "2019-ncov"),
                    expansions=("covid-19", "sars-cov-2", "coronavirus"),
                ),
                DiseaseFamily(
                    name="sars",
                    aliases=("sars", "sars-cov", "severe acute respiratory syndrome"),
                    expansions=("sars", "sars-cov"),
                ),
                DiseaseFamily(
                    name="mers",
                    aliases=("mers", "mers-cov", "middle east respiratory syndrome"),
                    expansions=("mers", "mers-cov"),
                ),
            ]
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "DiseaseDictionary":
        """Load from a JSON object mapping family -> {aliases, expansions}."""
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            [
                DiseaseFamily(
                    name=name,
                    aliases=tuple(spec["aliases"]),
                    expansions=tuple(spec["expansions"]),
                )
                for name, spec in obj.items()
            ]
        )


class CovidClassifier(Protocol):
    def classify(self, text: str) -> tuple[bool, float]: ...


class KeywordCovidClassifier:
    """Default classifier: positive iff any dictionary alias matches."""

    def __init__(self, dictionary: DiseaseDictionary | None = None):
        self.dictionary = dictionary or DiseaseDictionary.default()

    def classify(self, text: str) -> tuple[bool, float]:
        hit = self.dictionary.matches(text)
        return hit, 1.0 if hit else 0.0


class RemoteCovidClassifier:
    """Client for an external classifier (POST /classify {text})."""

    def __init__(self, endpoint: str, timeout: float = 10.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def classify(self, text: str) -> tuple[bool, float]:
        payload = post_json(f"{self.endpoint}/classify", {"text": text}, timeout=self.timeout)
        try:
            confidence = float(payload["confidence"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"classifier returned malformed payload: {payload!r}") from exc
        if not 0.0 <= confidence <= 1.0:
            raise ProviderError(f"classifier confidence out of range: {confidence}")
        return confidence >= REMOTE_CLASSIFIER_THRESHOLD, confidence


@dataclass
class TurnAnalysis:
    raw_text: str
    resolved_text: str
    is_covid: bool
    confidence: float
    enriched_text: str
    matched_entities: list[str]
    warnings: list[str] = field(default_factory=list)


def resolve_coreference(session_entities: list[str], utterance: str) -> str:
    """Rewrite pronouns (it/this/that) and the phrases "the virus" /
    "the disease" to the most recent disease entity, if any.

    ``session_entities`` is ordered most-recent-last; with no entities the
    utterance is returned unchanged.
    """
    if not session_entities:
        return utterance
    entity = session_entities[-1]
    resolved = utterance
    for phrase in _DEFINITE_PHRASES:
        resolved = re.sub(rf"\b{re.escape(phrase)}\b", entity, resolved, flags=re.IGNORECASE)
    resolved = re.sub(
        rf"\b(?:{'|'.join(_PRONOUNS)})\b", entity, resolved, flags=re.IGNORECASE
    )
    return resolved


def detect_covid(
    text: str,
    classifier: CovidClassifier,
    warnings: list[str] | None = None,
) -> tuple[bool, float]:
    """Ask the classifier whether the turn is coronavirus-related.

    A failing remote classifier falls back to the default keyword classifier;
    the fallback is noted on ``warnings`` when a sink is provided.
    """
    try:
        return classifier.classify(text)
    except ProviderError as exc:
        if warnings is not None:
            warnings.append(f"classifier failed ({exc}); fell back to keyword matching")
        return KeywordCovidClassifier().classify(text)


def enrich_query(text: str, dictionary: DiseaseDictionary) -> tuple[str, list[str]]:
    """Append each matched family's expansion terms that the text does not
    already contain; return the enriched text and the canonical entities.
    """
    enriched = text
    entities: list[str] = []
    for family in dictionary.match_families(text):
        entities.append(family.canonical)
        for term in family.expansions:
            if not _word_pattern(term).search(enriched.lower()):
                enriched = f"{enriched} {term}"
    return enriched, entities


def analyze_turn(
    utterance: str,
    session_entities: list[str],
    classifier: CovidClassifier | None = None,
    dictionary: DiseaseDictionary | None = None,
) -> TurnAnalysis:
    """Full NLU pass over one user turn: resolve, detect, enrich."""
    dictionary = dictionary or DiseaseDictionary.default()
    classifier = classifier or KeywordCovidClassifier(dictionary)
    warnings: list[str] = []
    resolved = resolve_coreference(session_entities, utterance)
    is_covid, confidence = detect_covid(resolved, classifier, warnings)
    if is_covid:
        enriched, entities = enrich_query(resolved, dictionary)
    else:
        enriched, entities = resolved, []
    return TurnAnalysis(
        raw_text=utterance,
        resolved_text=resolved,
        is_covid=is_covid,
        confidence=confidence,
        enriched_text=enriched,
        matched_entities=entities,
        warnings=warnings,
    )
